mod common;

use cgode::analysis::{analysis, Hm2Reading, I4Variant};
use cgode::conditions::{check_conformal_with, CheckOptions};
use cgode::expr::{RationalForm, SamplePoint};
use cgode::invariants::*;
use cgode::tensor::Shape;
use cgode::{OdeSystem, TensorField};
use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn moderate_point<R: Rng>(m: usize, rng: &mut R) -> SamplePoint {
    let values = (0..3 * m + 1)
        .map(|_| BigRational::new(BigInt::from(rng.gen_range(-1000..=1000)), BigInt::from(rng.gen_range(300..=997))))
        .collect();
    SamplePoint::new(m, values)
}

fn value(t: &TensorField, idx: &[usize], pt: &SamplePoint) -> f64 {
    to_f64(&t.get(idx).eval(pt.values()).unwrap())
}

fn compare(name: &str, sym: &TensorField, fd: impl Fn(&[usize]) -> f64, idx: &[usize], pt: &SamplePoint) {
    let s = value(sym, idx, pt);
    let n = fd(idx);
    assert!(rel_err(s, n) < 1e-5, "{name}{idx:?} at {pt}: exact {s}, finite differences {n}");
}

#[test]
fn invariants_match_finite_difference_pipeline() {
    let mixed = system(2, &["q1^2*p2 + y1*q2 + x*p1", "x*q1*q2 + p1^3 - y2*q2^2"]);
    let systems: Vec<(String, OdeSystem)> = vec![
        ("circle_m2".into(), load("circle_m2").1),
        ("cubic_m2".into(), load("cubic_m2").1),
        ("mixed".into(), mixed),
        ("nonflat_m2".into(), load("nonflat_m2").1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, sys) in systems {
        let m = sys.dim();
        let fd = common::fd::invariants(&sys);
        let (hx, hm1) = h_fields(&sys);
        let i2 = invariant_i2(&sys);
        let w2 = invariant_w2(&sys);
        let w3 = invariant_w3(&sys);
        let i4i = invariant_i4(&sys, I4Variant::Intro);
        let i4c = invariant_i4(&sys, I4Variant::Connection);
        for _ in 0..10 {
            let pt = moderate_point(m, &mut rng);
            let v = pt.values();
            let at = |f: &common::fd::Fd| to_f64(&f.eval(v));
            let tag = |t: &str| format!("{name}: {t}");
            compare(&tag("Hx"), &hx, |_| at(&fd.hx), &[], &pt);
            for j in 0..m {
                compare(&tag("H-1"), &hm1, |ix| at(&fd.hm1[ix[0]]), &[j], &pt);
                for k in 0..m {
                    compare(&tag("W2"), &w2, |ix| at(&fd.w2[ix[0]][ix[1]]), &[j, k], &pt);
                    compare(&tag("W3"), &w3, |ix| at(&fd.w3[ix[0]][ix[1]]), &[j, k], &pt);
                    compare(&tag("I4 intro"), &i4i, |ix| at(&fd.i4_intro[ix[0]][ix[1]]), &[j, k], &pt);
                    compare(&tag("I4 connection"), &i4c, |ix| at(&fd.i4_connection[ix[0]][ix[1]]), &[j, k], &pt);
                    for l in 0..m {
                        compare(&tag("I2"), &i2, |ix| at(&fd.i2[ix[0]][ix[1]][ix[2]]), &[j, k, l], &pt);
                    }
                }
            }
        }
    }
}

#[test]
fn trace_properties_on_corpus() {
    for name in CORPUS {
        let sys = load(name).1;
        let m = sys.dim();
        let w2 = invariant_w2(&sys);
        assert!(w2.trace().is_zero(), "{name}: tr W2");
        let i2 = invariant_i2(&sys);
        for j in 0..m {
            let first = (0..m).fold(RationalForm::zero(m), |acc, i| acc.add(i2.at3(i, i, j)));
            let second = (0..m).fold(RationalForm::zero(m), |acc, i| acc.add(i2.at3(i, j, i)));
            assert!(first.is_zero() && second.is_zero(), "{name}: contractions of I2");
        }
    }
}

#[test]
fn i4_symmetry_and_variant_agreement_are_reported() {
    for name in CORPUS {
        let sys = load(name).1;
        let ledger = check_conformal_with(&sys, &CheckOptions { ledger: true, ..Default::default() }).ledger.unwrap();
        let i4 = invariant_i4(&sys, I4Variant::Connection);
        let symmetric = i4.sub(&i4.transpose()).is_zero();
        assert_eq!(ledger.i4_symmetric, symmetric, "{name}");
        let agree = invariant_i4(&sys, I4Variant::Intro).sub(&i4).is_zero();
        assert_eq!(ledger.i4_intro_equals_connection, agree, "{name}");
        if agree {
            assert!(symmetric, "{name}: variants agree but I4 is not symmetric");
        }
    }
}

#[test]
fn h_field_examples() {
    let f0 = system(2, &["0", "0"]);
    let (hx, hm1) = h_fields(&f0);
    assert!(hx.is_zero() && hm1.is_zero());
    // f^i = 3 q_i (A . q) with A = (2, -3/5)
    let aq = "(2*q1 - 3/5*q2)";
    let sys = system(2, &[&format!("3*q1*{aq}"), &format!("3*q2*{aq}")]);
    let (_, hm1) = h_fields(&sys);
    assert_eq!(hm1.at(0).as_constant().unwrap(), rat(1, 1));
    assert_eq!(hm1.at(1).as_constant().unwrap(), rat(-3, 10));
    let sys = system(3, &["7*p1", "7*p2", "7*p3"]);
    assert_eq!(h_fields(&sys).0.value().as_constant().unwrap(), rat(-7, 4));
}

#[test]
fn examples_that_vanish() {
    for sys in [system(2, &["0", "0"]), system(2, &["5*p1", "5*p2"])] {
        assert!(invariant_i2(&sys).is_zero());
        assert!(invariant_w2(&sys).is_zero());
        assert!(invariant_w3(&sys).is_zero());
        assert!(invariant_i4(&sys, I4Variant::Intro).is_zero());
        assert!(invariant_i4(&sys, I4Variant::Connection).is_zero());
    }
}

#[test]
fn cubic_i2_entry() {
    let sys = load("cubic_m2").1;
    let e = invariant_i2(&sys).at3(0, 1, 1).clone();
    assert!(!e.is_zero());
    let mut pt = vec![BigRational::from_integer(0.into()); 7];
    pt[6] = BigRational::from_integer(1.into());
    assert_eq!(e.eval(&pt).unwrap(), rat(6, 1));
}

#[test]
fn linear_rhs_shows_in_w3() {
    // f^i = L^i_j y_j with a trace-free L
    let sys = system(2, &["2*y1 + 5*y2", "-y1 - 2*y2"]);
    let w3 = invariant_w3(&sys);
    assert_eq!(w3.shape(), Shape::Matrix);
    assert_eq!(w3.at2(0, 0).as_constant().unwrap(), rat(2, 1));
    assert_eq!(w3.at2(0, 1).as_constant().unwrap(), rat(5, 1));
    assert_eq!(w3.at2(1, 0).as_constant().unwrap(), rat(-1, 1));
}

#[test]
fn trace_free_examples() {
    let m = 2;
    let id = cgode::Tensor::matrix(m, |ix| RationalForm::from_int(m, (ix[0] == ix[1]) as i64));
    assert!(trace_free_matrix(&id).is_zero());
    let a = RationalForm::var(m, cgode::VarId::P(1));
    let b = RationalForm::var(m, cgode::VarId::Y(2));
    let d = cgode::Tensor::matrix(m, |ix| match (ix[0], ix[1]) {
        (0, 0) => a.clone(),
        (1, 1) => b.clone(),
        _ => RationalForm::zero(m),
    });
    let t = trace_free_matrix(&d);
    let half = rat(1, 2);
    assert_eq!(*t.at2(0, 0), a.sub(&b).scale(&half));
    assert_eq!(*t.at2(1, 1), b.sub(&a).scale(&half));
    let kernel = cgode::Tensor::tensor3(m, |ix| {
        let av = |j: usize| RationalForm::var(m, cgode::VarId::Q(j + 1));
        let mut e = RationalForm::zero(m);
        if ix[0] == ix[1] {
            e = e.add(&av(ix[2]));
        }
        if ix[0] == ix[2] {
            e = e.add(&av(ix[1]));
        }
        e
    });
    assert!(trace_free_sym3(&kernel).unwrap().is_zero());
    let asym = cgode::Tensor::tensor3(m, |ix| RationalForm::from_int(m, (ix == [0, 0, 1]) as i64));
    assert!(trace_free_sym3(&asym).is_err());
}

#[test]
fn match_examples() {
    let d = match_i2_zero_form(&system(2, &["0", "0"])).unwrap();
    assert!(d.a.is_zero() && d.b.is_zero() && d.c.is_zero());
    let d = match_i2_zero_form(&system(2, &["3*q1*q1", "3*q2*q1"])).unwrap();
    assert_eq!(d.a.at(0).as_constant().unwrap(), rat(1, 1));
    assert!(d.a.at(1).is_zero());
    assert!(match_i2_zero_form(&load("cubic_m2").1).is_none());
    assert!(match_i2_zero_form(&system(2, &["q1/(1+q2^2)", "0"])).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadratic_family_has_vanishing_i2(seed in any::<u64>(), m in 2usize..=3) {
        let sys = quadratic_family(&mut ChaCha8Rng::seed_from_u64(seed), m);
        prop_assert!(invariant_i2(&sys).is_zero());
        let d = match_i2_zero_form(&sys).expect("decomposition");
        prop_assert_eq!(d.reassemble(), sys.rhs_forms().to_vec());
    }

    #[test]
    fn trace_free_projections_kill_traces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 2;
        let mat = cgode::Tensor::matrix(m, |_| random_valid_expr(&mut rng, m, 2).normalize(m).unwrap());
        prop_assert!(trace_free_matrix(&mat).trace().is_zero());
        let v: Vec<RationalForm> = (0..m * m).map(|_| random_valid_expr(&mut rng, m, 2).normalize(m).unwrap()).collect();
        let t = cgode::Tensor::tensor3(m, |ix| {
            let (j, k) = if ix[1] <= ix[2] { (ix[1], ix[2]) } else { (ix[2], ix[1]) };
            v[(ix[0] * m + j * (j + 1) / 2 + k) % v.len()].clone()
        });
        let out = trace_free_sym3(&t).unwrap();
        for j in 0..m {
            let c = (0..m).fold(RationalForm::zero(m), |acc, i| acc.add(out.at3(i, i, j)));
            prop_assert!(c.is_zero());
        }
    }
}

#[test]
fn cache_returns_shared_analysis() {
    let sys = load("circle_m2").1;
    let a = analysis(&sys);
    let b = analysis(&load("circle_m2").1);
    assert!(std::sync::Arc::ptr_eq(&a, &b));
    assert!(a.hm2(Hm2Reading::Corrected).sub(a.hm2(Hm2Reading::Literal)).first_nonzero().is_some());
}
