mod common;

use std::str::FromStr;

use cgode::analysis::{Hm2Reading, Readings};
use cgode::conditions::{
    check_conformal, check_conformal_with, check_numeric, witness_value, CheckOptions, ConditionId,
};
use common::{circle, load, system, CORPUS};
use num_rational::BigRational;
use num_traits::Zero;

#[test]
fn circles_are_conformal() {
    for m in 2..=3 {
        let v = check_conformal(&circle(m));
        assert!(v.conformal, "m = {m}: {}", v.text());
        assert!(v.conditions.iter().all(|c| c.passed && c.witness.is_none()));
    }
}

#[test]
fn every_condition_is_reported() {
    for name in CORPUS {
        let (_, sys) = load(name);
        let v = check_conformal(&sys);
        let ids: Vec<ConditionId> = v.conditions.iter().map(|c| c.id).collect();
        let mut want = ConditionId::NUMBERED.to_vec();
        want.push(ConditionId::Rank);
        assert_eq!(ids, want, "{name}");
        assert_eq!(v.conformal, v.failing().is_empty());
    }
    let (_, cubic) = load("cubic_m2");
    let v = check_conformal(&cubic);
    assert!(v.failing().contains(&ConditionId::C1));
    assert!(v.failing().len() > 1, "later conditions are still evaluated");
}

#[test]
fn witnesses_are_exact() {
    for name in ["cubic_m2", "zero_m2", "linear_p_m2"] {
        let (_, sys) = load(name);
        let v = check_conformal(&sys);
        for c in v.conditions.iter().filter(|c| !c.passed && c.id != ConditionId::Rank) {
            let w = c.witness.as_ref().unwrap_or_else(|| panic!("{name}: no witness for {}", c.id));
            let value = witness_value(&c.residual, w).unwrap();
            assert!(!value.is_zero());
            assert_eq!(value, BigRational::from_str(&w.value).unwrap(), "{name}: condition {}", c.id);
        }
    }
}

#[test]
fn ledger_on_the_corpus() {
    for name in CORPUS {
        let (_, sys) = load(name);
        let ledger = check_conformal(&sys).ledger.unwrap();
        assert!(ledger.condition2_matches_covariant_form, "{name}");
        assert!(ledger.i4_symmetric, "{name}");
        assert_eq!(ledger.readings, Readings::default());
        assert_eq!(ledger.reading_outcomes.len(), 4);
    }
    for name in ["circle_m2", "circle_m3", "nonflat_m2"] {
        let (_, sys) = load(name);
        let ledger = check_conformal(&sys).ledger.unwrap();
        for o in &ledger.reading_outcomes {
            assert_eq!(o.annihilates, o.hm2 == Hm2Reading::Corrected, "{name}: {o:?}");
        }
        assert!(ledger.d2w3_variants_agree);
        assert!(ledger.covariant_forms_agree.iter().all(|(_, ok)| *ok), "{name}");
        assert_eq!(ledger.bootstrap, Some((true, true)), "{name}");
    }
}

#[test]
fn literal_hm2_rejects_the_circle() {
    let opts = CheckOptions {
        readings: Readings { hm2: Hm2Reading::Literal, ..Readings::default() },
        ..CheckOptions::default()
    };
    let v = check_conformal_with(&circle(2), &opts);
    assert!(!v.conformal);
    assert!(v.failing().contains(&ConditionId::C2));
}

#[test]
fn numeric_mode_agrees_with_exact_mode() {
    for name in CORPUS {
        let (_, sys) = load(name);
        let opts = CheckOptions { ledger: false, ..CheckOptions::default() };
        let exact = check_conformal_with(&sys, &opts);
        for seed in 0..3 {
            let numeric = check_numeric(&sys, &CheckOptions { seed, ..opts.clone() });
            assert_eq!(numeric.conformal, exact.conformal, "{name}");
            assert_eq!(numeric.failing(), exact.failing(), "{name} seed {seed}");
        }
    }
}

#[test]
fn quadratic_systems_pass_the_first_condition() {
    let sys = system(2, &["3*q1*(q1 + 3*q2) + x*p1", "3*q2*(q1 + 3*q2) + y1"]);
    let v = check_conformal(&sys);
    assert!(v.condition(ConditionId::C1).passed);
}
