//! Randomized scalar: an operation DAG that carries its values modulo a
//! 61-bit prime at a fixed set of random points.
//!
//! Zero testing looks at those values only, so a "zero" answer is probable
//! rather than certain. Nodes whose values all vanish are collapsed to the
//! zero constant, which keeps derivative chains small.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{ExactEval, JetScalar};
use crate::error::{Error, Result};
use crate::expr::{nvars, Expr, ExprNode, SamplePoint, VarId, ZERO_TEST_POINTS};

/// `2^61 - 1`
pub const MODULUS: u64 = (1 << 61) - 1;

fn reduce(x: u128) -> u64 {
    let p = MODULUS as u128;
    let r = (x & p) + (x >> 61);
    let r = (r & p) + (r >> 61);
    (if r >= p { r - p } else { r }) as u64
}

fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

fn mul_mod(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

fn neg_mod(a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        MODULUS - a
    }
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> Option<u64> {
    (a != 0).then(|| pow_mod(a, MODULUS - 2))
}

fn int_mod(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(MODULUS)).to_u64().unwrap()
}

/// `None` when the denominator vanishes modulo the prime.
fn rational_mod(c: &BigRational) -> Option<u64> {
    inv_mod(int_mod(c.denom())).map(|d| mul_mod(int_mod(c.numer()), d))
}

/// Random evaluation points shared by every probe built from it.
#[derive(Debug)]
pub struct ProbeContext {
    m: usize,
    points: Vec<Vec<u64>>,
}

impl ProbeContext {
    pub fn new(m: usize, seed: u64) -> Arc<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points =
            (0..ZERO_TEST_POINTS).map(|_| (0..nvars(m)).map(|_| rng.gen_range(0..MODULUS)).collect()).collect();
        Arc::new(ProbeContext { m, points })
    }

    pub fn dim(&self) -> usize {
        self.m
    }
}

#[derive(Debug)]
enum Op {
    Const(BigRational),
    Var(usize),
    Add(Probe, Probe),
    Mul(Probe, Probe),
    Neg(Probe),
    Scale(BigRational, Probe),
    Inv(Probe),
}

#[derive(Debug)]
struct Node {
    ctx: Arc<ProbeContext>,
    op: Op,
    vals: Vec<Option<u64>>,
    derivs: Vec<OnceLock<Probe>>,
}

#[derive(Clone, Debug)]
pub struct Probe(Arc<Node>);

impl Probe {
    fn make(ctx: &Arc<ProbeContext>, op: Op, vals: Vec<Option<u64>>) -> Probe {
        let derivs = (0..nvars(ctx.m)).map(|_| OnceLock::new()).collect();
        Probe(Arc::new(Node { ctx: ctx.clone(), op, vals, derivs }))
    }

    pub fn constant(ctx: &Arc<ProbeContext>, c: BigRational) -> Probe {
        let v = rational_mod(&c);
        Probe::make(ctx, Op::Const(c), vec![v; ZERO_TEST_POINTS])
    }

    pub fn var(ctx: &Arc<ProbeContext>, v: VarId) -> Probe {
        let s = v.slot(ctx.m);
        let vals = ctx.points.iter().map(|p| Some(p[s])).collect();
        Probe::make(ctx, Op::Var(s), vals)
    }

    /// Converts an expression tree without normalizing it.
    pub fn from_expr(ctx: &Arc<ProbeContext>, e: &Expr) -> Probe {
        match e.node() {
            ExprNode::Constant(c) => Probe::constant(ctx, c.clone()),
            ExprNode::Variable(v) => Probe::var(ctx, *v),
            ExprNode::Sum(xs) => {
                xs.iter().map(|x| Probe::from_expr(ctx, x)).reduce(|a, b| a.add(&b)).unwrap_or_else(|| zero(ctx))
            }
            ExprNode::Product(xs) => xs
                .iter()
                .map(|x| Probe::from_expr(ctx, x))
                .reduce(|a, b| a.mul(&b))
                .unwrap_or_else(|| Probe::constant(ctx, BigRational::one())),
            ExprNode::Power(b, n) => {
                let base = Probe::from_expr(ctx, b);
                let base = if *n < 0 { base.inv() } else { base };
                let mut acc = Probe::constant(ctx, BigRational::one());
                let mut sq = base;
                let mut k = n.unsigned_abs();
                while k > 0 {
                    if k & 1 == 1 {
                        acc = acc.mul(&sq);
                    }
                    k >>= 1;
                    if k > 0 {
                        sq = sq.mul(&sq);
                    }
                }
                acc
            }
            ExprNode::Quotient(a, b) => Probe::from_expr(ctx, a).mul(&Probe::from_expr(ctx, b).inv()),
        }
    }

    fn ctx(&self) -> &Arc<ProbeContext> {
        &self.0.ctx
    }

    fn as_const(&self) -> Option<&BigRational> {
        match &self.0.op {
            Op::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_literal(&self, n: i64) -> bool {
        self.as_const().is_some_and(|c| *c == BigRational::from_integer(n.into()))
    }

    /// Collapses probable zeros to the zero constant.
    fn build(&self, op: Op, vals: Vec<Option<u64>>) -> Probe {
        if vals.iter().all(|v| *v == Some(0)) {
            return zero(self.ctx());
        }
        Probe::make(self.ctx(), op, vals)
    }

    fn zip(&self, other: &Probe, f: impl Fn(u64, u64) -> u64) -> Vec<Option<u64>> {
        self.0.vals.iter().zip(&other.0.vals).map(|(a, b)| Some(f((*a)?, (*b)?))).collect()
    }

    pub fn inv(&self) -> Probe {
        if let Some(c) = self.as_const() {
            if !c.is_zero() {
                return Probe::constant(self.ctx(), c.recip());
            }
        }
        let vals = self.0.vals.iter().map(|v| inv_mod((*v)?)).collect();
        Probe::make(self.ctx(), Op::Inv(self.clone()), vals)
    }

    /// Values modulo the prime at the context points.
    pub fn values(&self) -> &[Option<u64>] {
        &self.0.vals
    }

    fn derive(&self, s: usize) -> Probe {
        let ctx = self.ctx();
        match &self.0.op {
            Op::Const(_) => zero(ctx),
            Op::Var(t) => {
                if *t == s {
                    Probe::constant(ctx, BigRational::one())
                } else {
                    zero(ctx)
                }
            }
            Op::Add(a, b) => a.d(s).add(&b.d(s)),
            Op::Mul(a, b) => a.d(s).mul(b).add(&a.mul(&b.d(s))),
            Op::Neg(a) => a.d(s).neg(),
            Op::Scale(c, a) => a.d(s).scale(c),
            Op::Inv(a) => a.d(s).mul(&self.mul(self)).neg(),
        }
    }

    fn d(&self, s: usize) -> Probe {
        self.0.derivs[s].get_or_init(|| self.derive(s)).clone()
    }

    fn eval_memo(&self, pt: &[BigRational], memo: &mut HashMap<*const Node, BigRational>) -> Result<BigRational> {
        let key = Arc::as_ptr(&self.0);
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let v = match &self.0.op {
            Op::Const(c) => c.clone(),
            Op::Var(s) => pt[*s].clone(),
            Op::Add(a, b) => a.eval_memo(pt, memo)? + b.eval_memo(pt, memo)?,
            Op::Mul(a, b) => a.eval_memo(pt, memo)? * b.eval_memo(pt, memo)?,
            Op::Neg(a) => -a.eval_memo(pt, memo)?,
            Op::Scale(c, a) => c * a.eval_memo(pt, memo)?,
            Op::Inv(a) => {
                let d = a.eval_memo(pt, memo)?;
                if d.is_zero() {
                    return Err(Error::Pole("reciprocal of zero in a randomized expression".into()));
                }
                d.recip()
            }
        };
        memo.insert(key, v.clone());
        Ok(v)
    }
}

fn zero(ctx: &Arc<ProbeContext>) -> Probe {
    Probe::constant(ctx, BigRational::zero())
}

impl JetScalar for Probe {
    fn zero_like(&self) -> Self {
        zero(self.ctx())
    }

    fn add(&self, other: &Self) -> Self {
        if self.is_literal(0) {
            return other.clone();
        }
        if other.is_literal(0) {
            return self.clone();
        }
        let vals = self.zip(other, add_mod);
        self.build(Op::Add(self.clone(), other.clone()), vals)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_literal(0) || other.is_literal(0) {
            return zero(self.ctx());
        }
        if self.is_literal(1) {
            return other.clone();
        }
        if other.is_literal(1) {
            return self.clone();
        }
        let vals = self.zip(other, mul_mod);
        self.build(Op::Mul(self.clone(), other.clone()), vals)
    }

    fn neg(&self) -> Self {
        if let Some(c) = self.as_const() {
            return Probe::constant(self.ctx(), -c);
        }
        let vals = self.0.vals.iter().map(|v| v.map(neg_mod)).collect();
        Probe::make(self.ctx(), Op::Neg(self.clone()), vals)
    }

    fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() || self.is_literal(0) {
            return zero(self.ctx());
        }
        if c.is_one() {
            return self.clone();
        }
        if let Some(k) = self.as_const() {
            return Probe::constant(self.ctx(), k * c);
        }
        let cm = rational_mod(c);
        let vals = self.0.vals.iter().map(|v| Some(mul_mod((*v)?, cm?))).collect();
        self.build(Op::Scale(c.clone(), self.clone()), vals)
    }

    fn partial(&self, v: VarId) -> Self {
        self.d(v.slot(self.ctx().m))
    }

    /// Probable zero: vanishes at every usable point.
    fn is_zero(&self) -> bool {
        if let Some(c) = self.as_const() {
            return c.is_zero();
        }
        let usable: Vec<u64> = self.0.vals.iter().flatten().copied().collect();
        !usable.is_empty() && usable.iter().all(|v| *v == 0)
    }
}

impl ExactEval for Probe {
    fn eval_at(&self, pt: &SamplePoint) -> Result<BigRational> {
        self.eval_memo(pt.values(), &mut HashMap::new())
    }
}
