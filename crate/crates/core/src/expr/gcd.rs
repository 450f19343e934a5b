//! Multivariate gcd over the integers by content / primitive-part recursion.
//!
//! Variables that occur in only one argument are eliminated first by taking
//! the gcd with that argument's coefficients; the remaining shared variables
//! are handled with a primitive polynomial remainder sequence in one main
//! variable over the coefficient ring of the others.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::poly::{Monomial, Poly};

/// Greatest common divisor with a positive leading coefficient.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone().with_positive_lead();
    }
    if b.is_zero() {
        return a.clone().with_positive_lead();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    if a == b {
        return a.clone().with_positive_lead();
    }
    let (ma, mb) = (a.monomial_content(), b.monomial_content());
    let mono = ma.gcd(&mb);
    let (a, b) = (strip_monomial(a, &ma), strip_monomial(b, &mb));
    let (ca, cb) = (a.content(), b.content());
    let int = ca.gcd(&cb);
    let a = if ca.is_one() { a } else { a.div_int(&ca) };
    let b = if cb.is_one() { b } else { b.div_int(&cb) };
    gcd_primitive(&a, &b).mul_term(&mono, &int)
}

fn strip_monomial(p: &Poly, m: &Monomial) -> Poly {
    if *m == Monomial::ONE {
        p.clone()
    } else {
        p.div_monomial(m)
    }
}

/// Both arguments have unit integer content and no monomial factor.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b || *a == b.neg() {
        return a.clone().with_positive_lead();
    }
    let (sa, sb) = (a.support(), b.support());
    if sa & sb == 0 {
        return Poly::one();
    }
    if sa != sb {
        // A variable missing from one side can only divide the gcd through
        // the other side's coefficients in that variable.
        let (with, without, extra) = if sa & !sb != 0 { (a, b, sa & !sb) } else { (b, a, sb & !sa) };
        let slot = extra.trailing_zeros() as usize;
        let mut g = without.clone();
        for coeff in with.coefficients_in(slot).iter().rev() {
            if coeff.is_zero() {
                continue;
            }
            g = gcd(&g, coeff);
            if g.is_constant() {
                return Poly::one();
            }
        }
        return g.with_positive_lead();
    }
    if a.len() <= b.len() {
        if b.div_exact(a).is_some() {
            return a.clone().with_positive_lead();
        }
    } else if a.div_exact(b).is_some() {
        return b.clone().with_positive_lead();
    }

    let slot = main_variable(a, b, sa);
    let (conta, ppa) = split_content(a, slot);
    let (contb, ppb) = split_content(b, slot);
    let cont = gcd(&conta, &contb);

    let (mut r0, mut r1) =
        if ppa.degree_in(slot) >= ppb.degree_in(slot) { (ppa, ppb) } else { (ppb, ppa) };
    let g = loop {
        let r = pseudo_remainder(&r0, &r1, slot);
        if r.is_zero() {
            break r1;
        }
        if r.degree_in(slot) == 0 {
            break Poly::one();
        }
        let (_, r) = split_content(&r, slot);
        r0 = r1;
        r1 = r;
    };
    let (_, g) = split_content(&g, slot);
    g.mul(&cont).with_positive_lead()
}

fn main_variable(a: &Poly, b: &Poly, support: u16) -> usize {
    (0..16)
        .filter(|s| support & (1 << s) != 0)
        .min_by_key(|&s| (a.degree_in(s).max(b.degree_in(s)), a.degree_in(s) + b.degree_in(s)))
        .unwrap()
}

/// Content with respect to `slot` and the corresponding primitive part.
fn split_content(p: &Poly, slot: usize) -> (Poly, Poly) {
    let mut cont = Poly::zero();
    for coeff in p.coefficients_in(slot) {
        if coeff.is_zero() {
            continue;
        }
        cont = gcd(&cont, &coeff);
        if cont.is_one() {
            break;
        }
    }
    let cont = cont.with_positive_lead();
    if cont.is_one() {
        return (cont, p.clone());
    }
    let pp = p.div_exact(&cont).expect("content divides polynomial");
    (cont, pp)
}

fn pseudo_remainder(a: &Poly, b: &Poly, slot: usize) -> Poly {
    let db = b.degree_in(slot);
    let lb = b.coeff_in(slot, db);
    let mut r = a.clone();
    while !r.is_zero() {
        let dr = r.degree_in(slot);
        if dr < db {
            break;
        }
        let lr = r.coeff_in(slot, dr);
        let shift = Monomial::var(slot, dr - db);
        r = r.mul(&lb).sub(&b.mul(&lr).mul_term(&shift, &BigInt::one()));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn v(s: usize) -> Poly {
        Poly::var(s)
    }
    fn c(n: i64) -> Poly {
        Poly::constant(BigInt::from(n))
    }

    #[test]
    fn cancels_common_factor() {
        // (q1^2 - 1) and (q1 - 1)
        let q = v(5);
        let a = q.mul(&q).sub(&c(1));
        let b = q.sub(&c(1));
        assert_eq!(gcd(&a, &b), b);
    }

    #[test]
    fn multivariate_common_factor() {
        let f = v(0).mul(&v(1)).add(&v(2)).add(&c(3));
        let g = v(1).sub(&v(2).mul(&v(2)));
        let h = v(0).add(&v(2)).sub(&c(1));
        let a = f.mul(&g).scale(&BigInt::from(6));
        let b = f.mul(&h).scale(&BigInt::from(4));
        assert_eq!(gcd(&a, &b), f.scale(&BigInt::from(2)));
        assert_eq!(gcd(&g, &h), c(1));
    }

    #[test]
    fn powers_and_monomials() {
        let s = c(1).add(&v(3).mul(&v(3))).add(&v(4).mul(&v(4)));
        let a = s.pow(3).mul(&v(5));
        let b = s.pow(2).mul(&v(5)).mul(&v(5));
        assert_eq!(gcd(&a, &b), s.pow(2).mul(&v(5)));
    }

    #[test]
    fn sign_normalized() {
        let a = v(1).neg().add(&c(2));
        let g = gcd(&a, &a.mul(&v(0)));
        assert!(g.lead_coeff() > BigInt::zero());
        assert_eq!(g, a.neg());
    }
}
