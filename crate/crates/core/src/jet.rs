//! Third-order systems on the jet surface, the total derivative and affine
//! point transformations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::algebra::JetScalar;
use crate::error::{Error, Result};
use crate::expr::{nvars, Expr, RationalForm, VarId, MAX_DIM};

/// `y_i''' = f_i(x, y, p, q)` for `i = 1..m`.
#[derive(Clone, Debug)]
pub struct OdeSystem {
    m: usize,
    f: Vec<Expr>,
    forms: Vec<RationalForm>,
}

impl OdeSystem {
    pub fn new(m: usize, f: Vec<Expr>) -> Result<Self> {
        check_dim(m)?;
        if f.len() != m {
            return Err(Error::InvalidSystem(format!("expected {m} right-hand sides, got {}", f.len())));
        }
        let forms = f.iter().map(|e| e.normalize(m)).collect::<Result<Vec<_>>>()?;
        Ok(OdeSystem { m, f, forms })
    }

    pub fn from_forms(m: usize, forms: Vec<RationalForm>) -> Result<Self> {
        check_dim(m)?;
        if forms.len() != m || forms.iter().any(|f| f.dim() != m) {
            return Err(Error::InvalidSystem(format!("expected {m} right-hand sides of dimension {m}")));
        }
        let f = forms.iter().map(RationalForm::to_expr).collect();
        Ok(OdeSystem { m, f, forms })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn rhs(&self) -> &[Expr] {
        &self.f
    }

    /// Right-hand sides in canonical form; these key the invariant cache.
    pub fn rhs_forms(&self) -> &[RationalForm] {
        &self.forms
    }

    pub fn total_derivative(&self, e: &Expr) -> Expr {
        total_derivative(self, e)
    }

    pub fn total_derivative_form(&self, e: &RationalForm) -> RationalForm {
        self.jet().total(e)
    }

    pub fn jet(&self) -> Jet<RationalForm> {
        let coords = VarId::all(self.m).into_iter().map(|v| RationalForm::var(self.m, v)).collect();
        Jet::new(self.m, coords, self.forms.clone())
    }

    /// `f` at a floating point state; `None` at a pole or non-finite value.
    pub fn eval_rhs_f64(&self, x: f64, y: &[f64], p: &[f64], q: &[f64]) -> Option<Vec<f64>> {
        let mut pt = Vec::with_capacity(nvars(self.m));
        pt.push(x);
        pt.extend_from_slice(y);
        pt.extend_from_slice(p);
        pt.extend_from_slice(q);
        let out: Vec<f64> = self.f.iter().map(|f| f.eval_f64(&pt, self.m)).collect();
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}

fn check_dim(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidSystem(format!("dimension must be at least 2, got {m}")));
    }
    if m > MAX_DIM {
        return Err(Error::UnsupportedDimension(m));
    }
    Ok(())
}

/// `d/dx e = e_x + p_i e_{y_i} + q_i e_{p_i} + f_i e_{q_i}` as a tree.
pub fn total_derivative(sys: &OdeSystem, e: &Expr) -> Expr {
    let m = sys.m;
    let mut terms = Vec::new();
    let mut push = |coeff: Option<Expr>, v: VarId| {
        let d = e.partial(v);
        if d.as_constant().is_some_and(|c| c.is_zero()) {
            return;
        }
        terms.push(match coeff {
            None => d,
            Some(c) => c * d,
        });
    };
    push(None, VarId::X);
    for i in 1..=m {
        push(Some(Expr::p(i)), VarId::Y(i));
        push(Some(Expr::q(i)), VarId::P(i));
        push(Some(sys.f[i - 1].clone()), VarId::Q(i));
    }
    Expr::sum(terms)
}

/// Jet coordinates and right-hand sides in some scalar representation.
#[derive(Clone, Debug)]
pub struct Jet<F> {
    m: usize,
    coords: Vec<F>,
    f: Vec<F>,
}

impl<F: JetScalar> Jet<F> {
    pub fn new(m: usize, coords: Vec<F>, f: Vec<F>) -> Self {
        assert_eq!(coords.len(), nvars(m));
        assert_eq!(f.len(), m);
        Jet { m, coords, f }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn coord(&self, v: VarId) -> &F {
        &self.coords[v.slot(self.m)]
    }

    /// `f^i`, 0-based.
    pub fn f(&self, i: usize) -> &F {
        &self.f[i]
    }

    pub fn zero(&self) -> F {
        self.coords[0].zero_like()
    }

    pub fn total(&self, e: &F) -> F {
        let mut acc = e.partial(VarId::X);
        for i in 1..=self.m {
            for (v, c) in [
                (VarId::Y(i), self.coord(VarId::P(i))),
                (VarId::P(i), self.coord(VarId::Q(i))),
                (VarId::Q(i), &self.f[i - 1]),
            ] {
                let d = e.partial(v);
                if !d.is_zero() {
                    acc = acc.add(&c.mul(&d));
                }
            }
        }
        acc
    }
}

/// `x' = lambda x + c`, `y' = A y + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineChange {
    a: Vec<Vec<BigRational>>,
    a_inv: Vec<Vec<BigRational>>,
    lambda: BigRational,
    c: BigRational,
    b: Vec<BigRational>,
}

impl AffineChange {
    pub fn new(a: Vec<Vec<BigRational>>, lambda: BigRational, c: BigRational, b: Vec<BigRational>) -> Result<Self> {
        let m = a.len();
        if a.iter().any(|row| row.len() != m) || b.len() != m {
            return Err(Error::InvalidInput("affine change needs a square matrix and a matching shift".into()));
        }
        if lambda.is_zero() {
            return Err(Error::SingularChange("lambda is zero".into()));
        }
        let a_inv = invert(&a).ok_or_else(|| Error::SingularChange("matrix is not invertible".into()))?;
        Ok(AffineChange { a, a_inv, lambda, c, b })
    }

    pub fn identity(m: usize) -> Self {
        let id: Vec<Vec<BigRational>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        AffineChange {
            a: id.clone(),
            a_inv: id,
            lambda: BigRational::one(),
            c: BigRational::zero(),
            b: vec![BigRational::zero(); m],
        }
    }

    /// Small random entries, invertible by construction.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let small = |rng: &mut R| BigRational::new(BigInt::from(rng.gen_range(-5..=5)), BigInt::from(rng.gen_range(1..=3)));
        loop {
            let a = (0..m).map(|_| (0..m).map(|_| small(rng)).collect()).collect();
            let mut lambda = small(rng);
            if lambda.is_zero() {
                lambda = BigRational::one();
            }
            let c = small(rng);
            let b = (0..m).map(|_| small(rng)).collect();
            if let Ok(ch) = Self::new(a, lambda, c, b) {
                return ch;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<BigRational>] {
        &self.a
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &AffineChange) -> AffineChange {
        let a = matmul(&self.a, &first.a);
        let a_inv = matmul(&first.a_inv, &self.a_inv);
        let lambda = &self.lambda * &first.lambda;
        let c = &self.lambda * &first.c + &self.c;
        let b = matvec(&self.a, &first.b).into_iter().zip(&self.b).map(|(u, v)| u + v).collect();
        AffineChange { a, a_inv, lambda, c, b }
    }

    /// Image of a jet point `(x, y, p, q)`.
    pub fn map_state(&self, x: f64, y: &[f64], p: &[f64], q: &[f64]) -> (f64, Vec<f64>, Vec<f64>, Vec<f64>) {
        let a: Vec<Vec<f64>> = self.a.iter().map(|r| r.iter().map(to_f64).collect()).collect();
        let lam = to_f64(&self.lambda);
        let apply = |v: &[f64]| -> Vec<f64> { a.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect() };
        let yb = apply(y).into_iter().zip(&self.b).map(|(u, b)| u + to_f64(b)).collect();
        let pb = apply(p).into_iter().map(|u| u / lam).collect();
        let qb = apply(q).into_iter().map(|u| u / (lam * lam)).collect();
        (lam * x + to_f64(&self.c), yb, pb, qb)
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The system satisfied by the transformed curves, in canonical form.
pub fn affine_transform(sys: &OdeSystem, ch: &AffineChange) -> Result<OdeSystem> {
    let m = sys.dim();
    if ch.dim() != m {
        return Err(Error::InvalidInput(format!("change of dimension {} applied to a system of dimension {m}", ch.dim())));
    }
    let var = |v| RationalForm::var(m, v);
    let konst = |c: &BigRational| RationalForm::from_rational(m, c);
    let inv_lambda = ch.lambda.recip();
    // Old coordinates in terms of the new ones.
    let mut values = vec![var(VarId::X).sub(&konst(&ch.c)).scale(&inv_lambda)];
    let lin = |k: usize, shift: bool, factor: &BigRational, kind: fn(usize) -> VarId| {
        let mut acc = RationalForm::zero(m);
        for l in 0..m {
            let mut t = var(kind(l + 1));
            if shift {
                t = t.sub(&konst(&ch.b[l]));
            }
            acc = acc.add(&t.scale(&ch.a_inv[k][l]));
        }
        acc.scale(factor)
    };
    let one = BigRational::one();
    let l2 = &ch.lambda * &ch.lambda;
    for k in 0..m {
        values.push(lin(k, true, &one, VarId::Y));
    }
    for k in 0..m {
        values.push(lin(k, false, &ch.lambda, VarId::P));
    }
    for k in 0..m {
        values.push(lin(k, false, &l2, VarId::Q));
    }
    let pulled = sys.rhs_forms().iter().map(|f| f.compose(&values)).collect::<Result<Vec<_>>>()?;
    let inv_l3 = &inv_lambda * &inv_lambda * &inv_lambda;
    let forms = (0..m)
        .map(|i| {
            let mut acc = RationalForm::zero(m);
            for (j, g) in pulled.iter().enumerate() {
                acc = acc.add(&g.scale(&ch.a[i][j]));
            }
            acc.scale(&inv_l3)
        })
        .collect();
    OdeSystem::from_forms(m, forms)
}

fn matmul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let m = a.len();
    (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

fn matvec(a: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Gauss-Jordan inverse; `None` if singular.
fn invert(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let m = a.len();
    let mut w: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).max_by_key(|&r| w[r][col].abs())?;
        if w[pivot][col].is_zero() {
            return None;
        }
        w.swap(col, pivot);
        let inv = w[col][col].recip();
        for v in w[col].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = w[col].clone();
        for (r, row) in w.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= p * &factor;
                }
            }
        }
    }
    Some(w.into_iter().map(|r| r[m..].to_vec()).collect())
}
