//! Immutable expression trees over exact rationals in the jet variables.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::poly::Monomial;
use super::rational::RationalForm;
use super::sample::SamplePoint;
use super::var::VarId;
use crate::error::{Error, Result};

/// Sample points used by the randomized zero-test pre-pass.
pub const ZERO_TEST_POINTS: usize = 7;
/// Resampling budget when a sample point hits a pole.
pub const POLE_RESAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprNode {
    Constant(BigRational),
    Variable(VarId),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Expr, i64),
    Quotient(Expr, Expr),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr(Arc<ExprNode>);

impl Expr {
    pub fn node(&self) -> &ExprNode {
        &self.0
    }

    pub fn constant(c: BigRational) -> Expr {
        Expr(Arc::new(ExprNode::Constant(c)))
    }

    pub fn int(c: i64) -> Expr {
        Expr::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::constant(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(v: VarId) -> Expr {
        Expr(Arc::new(ExprNode::Variable(v)))
    }

    pub fn x() -> Expr {
        Expr::var(VarId::X)
    }
    pub fn y(i: usize) -> Expr {
        Expr::var(VarId::Y(i))
    }
    pub fn p(i: usize) -> Expr {
        Expr::var(VarId::P(i))
    }
    pub fn q(i: usize) -> Expr {
        Expr::var(VarId::Q(i))
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr(Arc::new(ExprNode::Sum(terms))),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr(Arc::new(ExprNode::Product(factors))),
        }
    }

    pub fn pow(base: Expr, exp: i64) -> Expr {
        Expr(Arc::new(ExprNode::Power(base, exp)))
    }

    pub fn quotient(num: Expr, den: Expr) -> Expr {
        Expr(Arc::new(ExprNode::Quotient(num, den)))
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        match self.node() {
            ExprNode::Constant(c) => Some(c),
            _ => None,
        }
    }

    fn is_literal_zero(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_zero())
    }

    fn is_literal_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Largest variable index occurring in the tree (0 if none).
    pub fn max_index(&self) -> usize {
        match self.node() {
            ExprNode::Constant(_) => 0,
            ExprNode::Variable(v) => v.index().unwrap_or(0),
            ExprNode::Sum(xs) | ExprNode::Product(xs) => xs.iter().map(Expr::max_index).max().unwrap_or(0),
            ExprNode::Power(b, _) => b.max_index(),
            ExprNode::Quotient(a, b) => a.max_index().max(b.max_index()),
        }
    }

    pub fn check_dim(&self, m: usize) -> Result<()> {
        match self.node() {
            ExprNode::Constant(_) => Ok(()),
            ExprNode::Variable(v) => v.check(m),
            ExprNode::Sum(xs) | ExprNode::Product(xs) => xs.iter().try_for_each(|e| e.check_dim(m)),
            ExprNode::Power(b, _) => b.check_dim(m),
            ExprNode::Quotient(a, b) => a.check_dim(m).and(b.check_dim(m)),
        }
    }

    /// Canonical form in the variable ordering of an `m`-dimensional system.
    pub fn normalize(&self, m: usize) -> Result<RationalForm> {
        self.check_dim(m)?;
        self.fold(m)
    }

    fn fold(&self, m: usize) -> Result<RationalForm> {
        Ok(match self.node() {
            ExprNode::Constant(c) => RationalForm::from_rational(m, c),
            ExprNode::Variable(v) => RationalForm::var(m, *v),
            ExprNode::Sum(xs) => {
                let mut acc = RationalForm::zero(m);
                for x in xs {
                    acc = acc.add(&x.fold(m)?);
                }
                acc
            }
            ExprNode::Product(xs) => {
                let mut acc = RationalForm::one(m);
                for x in xs {
                    acc = acc.mul(&x.fold(m)?);
                }
                acc
            }
            ExprNode::Power(b, e) => {
                let base = b.fold(m)?;
                if *e < 0 && base.is_zero() {
                    return Err(Error::ZeroDenominator(self.to_string()));
                }
                base.pow(*e)?
            }
            ExprNode::Quotient(a, b) => {
                let den = b.fold(m)?;
                if den.is_zero() {
                    return Err(Error::ZeroDenominator(b.to_string()));
                }
                a.fold(m)?.div(&den)?
            }
        })
    }

    /// Exact partial derivative, every other jet variable held fixed.
    pub fn partial(&self, v: VarId) -> Expr {
        match self.node() {
            ExprNode::Constant(_) => Expr::zero(),
            ExprNode::Variable(w) => Expr::int((*w == v) as i64),
            ExprNode::Sum(xs) => {
                let terms: Vec<Expr> =
                    xs.iter().map(|x| x.partial(v)).filter(|d| !d.is_literal_zero()).collect();
                Expr::sum(terms)
            }
            ExprNode::Product(xs) => {
                let mut terms = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    let d = x.partial(v);
                    if d.is_literal_zero() {
                        continue;
                    }
                    let mut factors: Vec<Expr> = Vec::with_capacity(xs.len());
                    for (j, y) in xs.iter().enumerate() {
                        if i != j {
                            factors.push(y.clone());
                        }
                    }
                    if !d.is_literal_one() {
                        factors.push(d);
                    }
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            ExprNode::Power(b, e) => {
                let d = b.partial(v);
                if d.is_literal_zero() || *e == 0 {
                    return Expr::zero();
                }
                let mut factors = vec![Expr::int(*e)];
                if *e != 1 {
                    factors.push(Expr::pow(b.clone(), e - 1));
                }
                if !d.is_literal_one() {
                    factors.push(d);
                }
                Expr::product(factors)
            }
            ExprNode::Quotient(a, b) => {
                let da = a.partial(v);
                let db = b.partial(v);
                match (da.is_literal_zero(), db.is_literal_zero()) {
                    (true, true) => Expr::zero(),
                    (false, true) => Expr::quotient(da, b.clone()),
                    _ => {
                        let mut terms = Vec::new();
                        if !da.is_literal_zero() {
                            terms.push(Expr::product(vec![da, b.clone()]));
                        }
                        terms.push(Expr::product(vec![Expr::int(-1), a.clone(), db]));
                        Expr::quotient(Expr::sum(terms), Expr::pow(b.clone(), 2))
                    }
                }
            }
        }
    }

    /// Exact value at `pt`; a vanishing denominator is reported by name.
    pub fn eval_exact(&self, pt: &SamplePoint) -> Result<BigRational> {
        Ok(match self.node() {
            ExprNode::Constant(c) => c.clone(),
            ExprNode::Variable(v) => {
                v.check(pt.dim())?;
                pt.get(*v).clone()
            }
            ExprNode::Sum(xs) => {
                let mut acc = BigRational::zero();
                for x in xs {
                    acc += x.eval_exact(pt)?;
                }
                acc
            }
            ExprNode::Product(xs) => {
                let mut acc = BigRational::one();
                for x in xs {
                    acc *= x.eval_exact(pt)?;
                }
                acc
            }
            ExprNode::Power(b, e) => {
                let base = b.eval_exact(pt)?;
                if *e < 0 && base.is_zero() {
                    return Err(Error::Pole(b.to_string()));
                }
                num_traits::pow::Pow::pow(&base, *e as i32)
            }
            ExprNode::Quotient(a, b) => {
                let den = b.eval_exact(pt)?;
                if den.is_zero() {
                    return Err(Error::Pole(b.to_string()));
                }
                a.eval_exact(pt)? / den
            }
        })
    }

    pub fn eval_f64(&self, pt: &[f64], m: usize) -> f64 {
        match self.node() {
            ExprNode::Constant(c) => {
                use num_traits::ToPrimitive;
                c.to_f64().unwrap_or(f64::NAN)
            }
            ExprNode::Variable(v) => pt[v.slot(m)],
            ExprNode::Sum(xs) => xs.iter().map(|x| x.eval_f64(pt, m)).sum(),
            ExprNode::Product(xs) => xs.iter().map(|x| x.eval_f64(pt, m)).product(),
            ExprNode::Power(b, e) => b.eval_f64(pt, m).powi(*e as i32),
            ExprNode::Quotient(a, b) => a.eval_f64(pt, m) / b.eval_f64(pt, m),
        }
    }

    /// Randomized evaluation pass: a sample point with a nonzero value, or
    /// `None` if every usable point evaluated to zero. Points at a pole are
    /// redrawn up to `POLE_RESAMPLES` times.
    pub fn random_nonzero_witness(&self, m: usize, points: usize, seed: u64) -> Option<SamplePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..points {
            for _ in 0..POLE_RESAMPLES {
                let pt = SamplePoint::random(m, &mut rng);
                match self.eval_exact(&pt) {
                    Ok(v) if v.is_zero() => break,
                    Ok(_) => return Some(pt),
                    Err(_) => continue,
                }
            }
        }
        None
    }

    /// Decides whether the expression is identically zero. Random evaluation
    /// may only short-circuit a `false`; `true` always comes from the
    /// canonical form.
    pub fn is_zero(&self, m: usize) -> Result<bool> {
        self.check_dim(m)?;
        if self.random_nonzero_witness(m, ZERO_TEST_POINTS, 0).is_some() {
            return Ok(false);
        }
        Ok(self.normalize(m)?.is_zero())
    }
}

impl RationalForm {
    /// Expression tree of the canonical form.
    pub fn to_expr(&self) -> Expr {
        let m = self.dim();
        let poly_expr = |p: &super::poly::Poly| {
            let terms = p
                .terms()
                .iter()
                .map(|(mono, c)| monomial_expr(m, mono, c))
                .collect();
            Expr::sum(terms)
        };
        let num = poly_expr(self.numer());
        if self.denom().is_one() {
            num
        } else {
            Expr::quotient(num, poly_expr(self.denom()))
        }
    }
}

fn monomial_expr(m: usize, mono: &Monomial, c: &BigInt) -> Expr {
    let mut factors = Vec::new();
    if !c.is_one() || *mono == Monomial::ONE {
        factors.push(Expr::constant(BigRational::from_integer(c.clone())));
    }
    for s in 0..super::var::nvars(m) {
        match mono.exp(s) {
            0 => {}
            1 => factors.push(Expr::var(VarId::from_slot(s, m))),
            e => factors.push(Expr::pow(Expr::var(VarId::from_slot(s, m)), e as i64)),
        }
    }
    Expr::product(factors)
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, -rhs])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::quotient(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.as_constant() {
            Some(c) => Expr::constant(-c),
            None => Expr::product(vec![Expr::int(-1), self]),
        }
    }
}

// Precedence levels used by the printer; they mirror the input grammar.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self.node() {
            ExprNode::Constant(c) => {
                if !c.is_integer() {
                    PREC_PRODUCT
                } else if c.is_negative() {
                    PREC_UNARY
                } else {
                    PREC_ATOM
                }
            }
            ExprNode::Variable(_) => PREC_ATOM,
            ExprNode::Sum(_) => PREC_SUM,
            ExprNode::Product(_) | ExprNode::Quotient(..) => PREC_PRODUCT,
            ExprNode::Power(..) => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_bare(f)?;
            write!(f, ")")
        } else {
            self.write_bare(f)
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            ExprNode::Constant(c) => write!(f, "{c}"),
            ExprNode::Variable(v) => write!(f, "{v}"),
            ExprNode::Sum(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    match (i, negated(x)) {
                        (0, _) => x.write_at(f, PREC_SUM)?,
                        (_, Some(pos)) => {
                            write!(f, " - ")?;
                            pos.write_at(f, PREC_PRODUCT)?;
                        }
                        (_, None) => {
                            write!(f, " + ")?;
                            x.write_at(f, PREC_PRODUCT)?;
                        }
                    }
                }
                Ok(())
            }
            ExprNode::Product(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    // `*` and `/` associate to the left, so only later factors
                    // need to be bracketed at the power level.
                    let min = if i == 0 { PREC_PRODUCT } else { 4 };
                    x.write_at(f, min)?;
                }
                Ok(())
            }
            ExprNode::Power(b, e) => {
                b.write_at(f, PREC_ATOM)?;
                if *e < 0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
            ExprNode::Quotient(a, b) => {
                a.write_at(f, PREC_PRODUCT)?;
                write!(f, "/")?;
                b.write_at(f, 4)
            }
        }
    }
}

/// For a sum term printed after `-`: the term with its sign flipped.
fn negated(x: &Expr) -> Option<Expr> {
    match x.node() {
        ExprNode::Constant(c) if c.is_negative() => Some(Expr::constant(-c)),
        ExprNode::Product(fs) => {
            let c = fs.first()?.as_constant()?;
            if !c.is_negative() {
                return None;
            }
            let mut rest: Vec<Expr> = fs[1..].to_vec();
            if !(-c).is_one() {
                rest.insert(0, Expr::constant(-c));
            }
            Some(Expr::product(rest))
        }
        _ => None,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
