use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::gcd;
use super::poly::{write_poly, Monomial, Poly};
use super::var::VarId;
use crate::error::{Error, Result};

/// Canonical quotient of integer polynomials.
///
/// The numerator and denominator are coprime, their integer contents are
/// coprime, and the denominator has a positive leading coefficient under the
/// grlex order. Zero is `(0, 1)`. Two rational functions are equal iff their
/// forms are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalForm {
    num: Poly,
    den: Poly,
    m: usize,
}

impl RationalForm {
    pub fn zero(m: usize) -> Self {
        RationalForm { num: Poly::zero(), den: Poly::one(), m }
    }

    pub fn one(m: usize) -> Self {
        RationalForm { num: Poly::one(), den: Poly::one(), m }
    }

    pub fn from_int(m: usize, c: i64) -> Self {
        Self::from_poly(m, Poly::constant(BigInt::from(c)))
    }

    pub fn from_rational(m: usize, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(m);
        }
        // BigRational keeps a positive reduced denominator.
        RationalForm {
            num: Poly::constant(c.numer().clone()),
            den: Poly::constant(c.denom().clone()),
            m,
        }
    }

    pub fn var(m: usize, v: VarId) -> Self {
        Self::from_poly(m, Poly::var(v.slot(m)))
    }

    pub fn from_poly(m: usize, p: Poly) -> Self {
        RationalForm { num: p, den: Poly::one(), m }
    }

    /// Reduces `num / den` to canonical form.
    pub fn new(m: usize, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator(format!("({num}) / 0")));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        Ok(Self::fix_units(m, num, den))
    }

    /// Normalizes integer content and sign of an already coprime pair.
    fn fix_units(m: usize, num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero(m);
        }
        let mut c = num.content().gcd(&den.content());
        if den.lead_coeff().is_negative() {
            c = -c;
        }
        if c.is_one() {
            RationalForm { num, den, m }
        } else {
            RationalForm { num: num.div_int(&c), den: den.div_int(&c), m }
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(BigRational::new(n, d))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let m = self.m;
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let join = |a: &Poly, b: &Poly| if negate { a.sub(b) } else { a.add(b) };
        if self.den == other.den {
            let num = join(&self.num, &other.num);
            return Self::new(m, num, self.den.clone()).unwrap();
        }
        let g = gcd(&self.den, &other.den);
        if g.is_constant() {
            // Coprime denominators: no polynomial cancellation is possible.
            let num = join(&self.num.mul(&other.den), &other.num.mul(&self.den));
            return Self::fix_units(m, num, self.den.mul(&other.den));
        }
        let bd = self.den.div_exact(&g).unwrap();
        let dd = other.den.div_exact(&g).unwrap();
        let num = join(&self.num.mul(&dd), &other.num.mul(&bd));
        let h = gcd(&num, &g);
        if h.is_one() {
            Self::fix_units(m, num, g.mul(&bd).mul(&dd))
        } else {
            let num = num.div_exact(&h).unwrap();
            let g = g.div_exact(&h).unwrap();
            Self::fix_units(m, num, g.mul(&bd).mul(&dd))
        }
    }

    pub fn neg(&self) -> Self {
        RationalForm { num: self.num.neg(), den: self.den.clone(), m: self.m }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.m;
        if self.is_zero() || other.is_zero() {
            return Self::zero(m);
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), other.den.div_exact(&g1).unwrap())
        };
        let (c, b) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        Self::fix_units(m, a.mul(&c), b.mul(&d))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() || self.is_zero() {
            return Self::zero(self.m);
        }
        Self::fix_units(self.m, self.num.scale(c.numer()), self.den.scale(c.denom()))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator("1 / (0)".into()));
        }
        Ok(Self::fix_units(self.m, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(Self::fix_units(self.m, base.num.pow(k), base.den.pow(k)))
    }

    pub fn partial(&self, v: VarId) -> Self {
        let s = v.slot(self.m);
        let dn = self.num.derivative(s);
        if self.den.is_constant() {
            return Self::fix_units(self.m, dn, self.den.clone());
        }
        let dd = self.den.derivative(s);
        if dd.is_zero() {
            return Self::new(self.m, dn, self.den.clone()).unwrap();
        }
        // (n/d)' = (n' * (d/g) - n * (d'/g)) / (d * d/g),  g = gcd(d, d')
        let g = gcd(&self.den, &dd);
        let dg = self.den.div_exact(&g).unwrap();
        let ddg = dd.div_exact(&g).unwrap();
        let num = dn.mul(&dg).sub(&self.num.mul(&ddg));
        Self::new(self.m, num, self.den.mul(&dg)).unwrap()
    }

    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole(self.den_string()));
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    /// Substitutes rational functions for every jet variable.
    pub fn compose(&self, values: &[RationalForm]) -> Result<RationalForm> {
        let m = values.first().map(|v| v.m).unwrap_or(self.m);
        let lift = |c: &BigInt| RationalForm::from_poly(m, Poly::constant(c.clone()));
        let n = self.num.compose(values, lift, RationalForm::zero(m));
        let d = self.den.compose(values, lift, RationalForm::zero(m));
        n.div(&d)
    }

    fn den_string(&self) -> String {
        let mut s = String::new();
        write_poly(&mut s, &self.den, &|slot| VarId::from_slot(slot, self.m).to_string()).unwrap();
        s
    }

    /// Variables that actually occur.
    pub fn variables(&self) -> Vec<VarId> {
        let mask = self.num.support() | self.den.support();
        (0..16)
            .filter(|s| mask & (1 << s) != 0)
            .map(|s| VarId::from_slot(s, self.m))
            .collect()
    }

    pub fn degree_in(&self, v: VarId) -> (u32, u32) {
        let s = v.slot(self.m);
        (self.num.degree_in(s), self.den.degree_in(s))
    }

    /// `self = sum_k out[k] * v^k` when the form is polynomial in `v`.
    pub fn coefficients_in(&self, v: VarId) -> Option<Vec<RationalForm>> {
        let s = v.slot(self.m);
        if self.den.degree_in(s) > 0 {
            return None;
        }
        Some(
            self.num
                .coefficients_in(s)
                .into_iter()
                .map(|c| Self::new(self.m, c, self.den.clone()).unwrap())
                .collect(),
        )
    }

    pub fn monomial_term(m: usize, mono: Monomial, c: BigRational) -> Self {
        Self::fix_units(m, Poly::monomial(mono, c.numer().clone()), Poly::constant(c.denom().clone()))
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |slot: usize| VarId::from_slot(slot, self.m).to_string();
        let simple = |p: &Poly| p.len() == 1 && (p.terms()[0].1.is_one() || p.terms()[0].0 == Monomial::ONE);
        if self.den.is_one() {
            return write_poly(f, &self.num, &name);
        }
        if simple(&self.num) {
            write_poly(f, &self.num, &name)?;
        } else {
            write!(f, "(")?;
            write_poly(f, &self.num, &name)?;
            write!(f, ")")?;
        }
        write!(f, "/")?;
        if simple(&self.den) && self.den.terms()[0].0 == Monomial::ONE {
            write_poly(f, &self.den, &name)
        } else {
            write!(f, "(")?;
            write_poly(f, &self.den, &name)?;
            write!(f, ")")
        }
    }
}

impl std::ops::Add for RationalForm {
    type Output = RationalForm;
    fn add(self, rhs: RationalForm) -> RationalForm {
        RationalForm::add(&self, &rhs)
    }
}

impl<'a> std::ops::Mul<&'a RationalForm> for &'a RationalForm {
    type Output = RationalForm;
    fn mul(self, rhs: &'a RationalForm) -> RationalForm {
        RationalForm::mul(self, rhs)
    }
}
