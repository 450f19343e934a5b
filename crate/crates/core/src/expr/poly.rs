//! Sparse multivariate polynomials with integer coefficients.
//!
//! Monomials pack one 16-bit exponent lane per variable slot into two
//! `u128` words, slots 8..16 in `hi` and 0..8 in `lo`, highest slot in the
//! most significant lane. Ordering on `(degree, hi, lo)` is then graded
//! lexicographic with `x < y1 < .. < qm`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Per-variable exponent bound; keeps every lane below 0x8000 so packed
/// addition never carries.
pub const MAX_EXPONENT: u32 = 0x7fff;

const HIGH_BITS: u128 = 0x8000_8000_8000_8000_8000_8000_8000_8000;
const LANE: u32 = 16;
const LANE_MASK: u128 = 0xffff;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    hi: u128,
    lo: u128,
}

#[inline]
fn lane(slot: usize) -> (bool, u32) {
    (slot >= 8, LANE * (slot % 8) as u32)
}

impl Monomial {
    pub const ONE: Monomial = Monomial { degree: 0, hi: 0, lo: 0 };

    pub fn var(slot: usize, exp: u32) -> Monomial {
        assert!(slot < 16, "variable slot {slot} exceeds packed monomial width");
        assert!(exp <= MAX_EXPONENT, "exponent {exp} too large");
        let (high, shift) = lane(slot);
        let word = (exp as u128) << shift;
        if high {
            Monomial { degree: exp, hi: word, lo: 0 }
        } else {
            Monomial { degree: exp, hi: 0, lo: word }
        }
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        exps.iter()
            .enumerate()
            .fold(Monomial::ONE, |acc, (s, &e)| acc.mul(&Monomial::var(s, e)))
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn exp(&self, slot: usize) -> u32 {
        let (high, shift) = lane(slot);
        let word = if high { self.hi } else { self.lo };
        ((word >> shift) & LANE_MASK) as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|s| self.exp(s)).collect()
    }

    /// Bitmask of slots with a nonzero exponent.
    pub fn support(&self) -> u16 {
        let mut mask = 0u16;
        for s in 0..16 {
            if self.exp(s) != 0 {
                mask |= 1 << s;
            }
        }
        mask
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (hi, lo) = (self.hi + other.hi, self.lo + other.lo);
        assert!((hi | lo) & HIGH_BITS == 0, "monomial exponent overflow");
        Monomial { degree: self.degree + other.degree, hi, lo }
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        let fits = |a: u128, b: u128| ((b | HIGH_BITS) - a) & HIGH_BITS == HIGH_BITS;
        self.degree <= other.degree && fits(self.hi, other.hi) && fits(self.lo, other.lo)
    }

    /// `other / self`, if exact.
    #[inline]
    pub fn div_into(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other).then(|| Monomial {
            degree: other.degree - self.degree,
            hi: other.hi - self.hi,
            lo: other.lo - self.lo,
        })
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::ONE;
        for s in 0..16 {
            let e = self.exp(s).min(other.exp(s));
            if e > 0 {
                out = out.mul(&Monomial::var(s, e));
            }
        }
        out
    }

    /// Same monomial with the exponent of `slot` set to zero.
    pub fn without(&self, slot: usize) -> Monomial {
        let e = self.exp(slot);
        let (high, shift) = lane(slot);
        let clear = !(LANE_MASK << shift);
        let mut out = Monomial { degree: self.degree - e, ..*self };
        if high {
            out.hi &= clear;
        } else {
            out.lo &= clear;
        }
        out
    }
}

pub type Term = (Monomial, BigInt);

/// Terms are kept strictly descending in monomial order with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<Term>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::ONE, c)] }
        }
    }

    pub fn var(slot: usize) -> Poly {
        Poly { terms: vec![(Monomial::var(slot, 1), BigInt::one())] }
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from unsorted terms, combining duplicates.
    pub fn from_terms(mut terms: Vec<Term>) -> Poly {
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Monomial::ONE && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if *m == Monomial::ONE => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn lead(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn lead_coeff(&self) -> BigInt {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn support(&self) -> u16 {
        self.terms.iter().fold(0, |acc, t| acc | t.0.support())
    }

    pub fn degree_in(&self, slot: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exp(slot)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, c)| (*m, if negate { -c } else { c.clone() })));
        Poly { terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return large.mul_term(m, c);
        }
        let mut prods = Vec::with_capacity(small.len() * large.len());
        for (ma, ca) in &small.terms {
            for (mb, cb) in &large.terms {
                prods.push((ma.mul(mb), ca * cb));
            }
        }
        Poly::from_terms(prods)
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // Multiplying by a monomial preserves the order.
        Poly { terms: self.terms.iter().map(|(tm, tc)| (tm.mul(m), tc * c)).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        self.mul_term(&Monomial::ONE, c)
    }

    /// Divides every coefficient by `c`; the caller guarantees exactness.
    pub fn div_int(&self, c: &BigInt) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, tc)| (*m, tc / c)).collect() }
    }

    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(tm, c)| (m.div_into(tm).expect("monomial does not divide"), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, slot: usize) -> Poly {
        let unit = Monomial::var(slot, 1);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exp(slot);
                (e > 0).then(|| (unit.div_into(m).unwrap(), c * BigInt::from(e)))
            })
            .collect();
        Poly::from_terms(terms)
    }

    /// Coefficients with respect to `slot`: `self = sum_k out[k] * v^k`.
    pub fn coefficients_in(&self, slot: usize) -> Vec<Poly> {
        let d = self.degree_in(slot) as usize;
        let mut buckets: Vec<Vec<Term>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(slot) as usize].push((m.without(slot), c.clone()));
        }
        // Removing one variable from a grlex-sorted list can break the order.
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    pub fn coeff_in(&self, slot: usize, k: u32) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exp(slot) == k)
                .map(|(m, c)| (m.without(slot), c.clone()))
                .collect(),
        )
    }

    /// Nonnegative gcd of the integer coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::ONE;
        };
        let mut g = *first;
        for (m, _) in it {
            if g == Monomial::ONE {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Same polynomial with a positive leading coefficient.
    pub fn with_positive_lead(self) -> Poly {
        if self.lead_coeff().is_negative() {
            self.neg()
        } else {
            self
        }
    }

    /// Exact division by `d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return self.terms.iter().all(|(_, tc)| tc.is_multiple_of(&c)).then(|| self.div_int(&c));
        }
        let (dm, dc) = &d.terms[0];
        if d.len() == 1 {
            let mut out = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.push((dm.div_into(m)?, q));
            }
            return Some(Poly { terms: out });
        }
        if d.total_degree() > self.total_degree() {
            return None;
        }
        for s in 0..16 {
            if d.degree_in(s) > self.degree_in(s) {
                return None;
            }
        }
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((&rm, _)) = rem.last_key_value() {
            let rc = rem.remove(&rm).unwrap();
            let qm = dm.div_into(&rm)?;
            let (qc, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            for (tm, tc) in &d.terms[1..] {
                let key = tm.mul(&qm);
                let delta = tc * &qc;
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut powers: Vec<Vec<BigRational>> = vec![Vec::new(); point.len()];
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (s, value) in point.iter().enumerate() {
                let e = m.exp(s) as usize;
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[s];
                if cache.is_empty() {
                    cache.push(BigRational::one());
                }
                while cache.len() <= e {
                    let next = cache.last().unwrap() * value;
                    cache.push(next);
                }
                t *= &cache[e];
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (s, v) in point.iter().enumerate() {
                    let e = m.exp(s);
                    if e > 0 {
                        t *= v.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes a value for every variable slot and sums in the target ring.
    pub fn compose<T, F>(&self, values: &[T], lift: F, zero: T) -> T
    where
        T: Clone,
        F: Fn(&BigInt) -> T,
        T: std::ops::Add<T, Output = T>,
        for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
    {
        let mut powers: Vec<Vec<T>> = vec![Vec::new(); values.len()];
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut t = lift(c);
            for (s, value) in values.iter().enumerate() {
                let e = m.exp(s) as usize;
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[s];
                if cache.is_empty() {
                    cache.push(value.clone());
                }
                while cache.len() < e {
                    let next = cache.last().unwrap() * value;
                    cache.push(next);
                }
                t = &t * &cache[e - 1];
            }
            acc = acc + t;
        }
        acc
    }
}

impl fmt::Display for Poly {
    /// Writes the polynomial with slot names `v0, v1, ..`; see `RationalForm`
    /// for the jet-variable rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, &|s| format!("v{s}"))
    }
}

pub(crate) fn write_poly(
    f: &mut impl fmt::Write,
    p: &Poly,
    name: &dyn Fn(usize) -> String,
) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (idx, (m, c)) in p.terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if idx == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        let mut factors = Vec::new();
        if !abs.is_one() || *m == Monomial::ONE {
            factors.push(abs.to_string());
        }
        for s in 0..16 {
            match m.exp(s) {
                0 => {}
                1 => factors.push(name(s)),
                e => factors.push(format!("{}^{e}", name(s))),
            }
        }
        write!(f, "{}", factors.join("*"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: usize) -> Poly {
        Poly::var(s)
    }

    fn c(n: i64) -> Poly {
        Poly::constant(BigInt::from(n))
    }

    #[test]
    fn grlex_order() {
        // total degree dominates, then the highest slot
        let a = Monomial::var(0, 3);
        let b = Monomial::var(1, 1).mul(&Monomial::var(0, 1));
        assert!(a > b);
        assert!(Monomial::var(2, 1) > Monomial::var(1, 1));
        assert!(Monomial::var(1, 2) < Monomial::var(2, 1).mul(&Monomial::var(0, 1)));
    }

    #[test]
    fn monomial_division() {
        let a = Monomial::from_exponents(&[2, 1, 0, 3]);
        let b = Monomial::from_exponents(&[1, 1, 0, 1]);
        assert!(b.divides(&a));
        assert!(!a.divides(&b));
        assert_eq!(b.div_into(&a), Some(Monomial::from_exponents(&[1, 0, 0, 2])));
        assert_eq!(a.gcd(&b), b);
    }

    #[test]
    fn arithmetic() {
        let p = v(0).add(&c(1));
        let sq = p.mul(&p);
        assert_eq!(sq, v(0).mul(&v(0)).add(&v(0).scale(&BigInt::from(2))).add(&c(1)));
        assert_eq!(p.pow(3), sq.mul(&p));
        assert!(p.sub(&p).is_zero());
        assert_eq!(sq.derivative(0), p.scale(&BigInt::from(2)));
    }

    #[test]
    fn exact_division() {
        let a = v(0).add(&v(1));
        let b = v(2).sub(&c(3));
        let prod = a.mul(&b).mul(&a);
        assert_eq!(prod.div_exact(&a).unwrap(), a.mul(&b));
        assert_eq!(prod.div_exact(&b).unwrap(), a.mul(&a));
        assert!(prod.div_exact(&v(0).add(&c(1))).is_none());
        assert!(a.scale(&BigInt::from(3)).div_exact(&c(2)).is_none());
    }

    #[test]
    fn coefficients_split() {
        let p = v(0).mul(&v(1)).add(&v(1).pow(2).mul(&v(2))).add(&c(5));
        let cs = p.coefficients_in(1);
        assert_eq!(cs, vec![c(5), v(0), v(2)]);
        assert_eq!(p.coeff_in(1, 2), v(2));
    }
}
