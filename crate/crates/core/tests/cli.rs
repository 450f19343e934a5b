mod common;

use std::process::{Command, Output};

use cgode::conditions::{check_conformal, ConditionId};
use cgode::frontend::report::Mode;
use cgode::frontend::{parse_expression, Report};
use cgode::numeric::numeric_circle_oracle;
use common::{corpus_path, load, random_valid_expr, CORPUS, FLAT_CANDIDATES};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cgode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgode")).args(args).output().unwrap()
}

fn check(name: &str, extra: &[&str]) -> Output {
    let path = corpus_path(name);
    let mut args = vec!["check", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    cgode(&args)
}

fn json(out: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(check("circle_m2", &[]).status.code(), Some(0));
    assert_eq!(check("cubic_m2", &[]).status.code(), Some(1));
    assert_eq!(check("zero_m2", &[]).status.code(), Some(1));
    let bad = check("malformed", &[]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("3:25"));
    assert_eq!(cgode(&["check", "/nonexistent/file.ode"]).status.code(), Some(2));
    assert_eq!(check("circle_m2", &["--i4-variant", "sideways"]).status.code(), Some(2));
    assert_eq!(cgode(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_reports() {
    let r = json(&check("circle_m2", &["--json"]));
    assert!(r.verdict.conformal && !r.verdict.probable);
    assert_eq!(r.conditions.len(), 8);
    assert!(r.conditions.iter().all(|c| c.passed));
    assert_eq!(r.mode, Mode::Exact);
    assert!(r.ledger.is_some());
    assert!(r.invariants.is_none() && r.oracle.is_none() && r.timings.is_none());

    let r = json(&check("zero_m2", &["--json"]));
    assert_eq!(r.verdict.failing, vec![ConditionId::Rank]);

    let r = json(&check("cubic_m2", &["--json"]));
    let c1 = r.conditions.iter().find(|c| c.id == ConditionId::C1).unwrap();
    assert!(!c1.passed && c1.witness.is_some());
}

#[test]
fn json_round_trips_and_is_deterministic() {
    let a = check("circle_m3", &["--json", "--dump-invariants"]);
    let b = check("circle_m3", &["--json", "--dump-invariants"]);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    assert_eq!(r.invariants.as_ref().unwrap().len(), 4);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("cgode-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = check("cubic_m2", &["--json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let r = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!r.verdict.conformal);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn variant_flags_are_recorded() {
    let r = json(&check("circle_m2", &["--json", "--i4-variant", "intro", "--d2w3-variant", "a", "--seed", "7"]));
    assert!(r.verdict.conformal);
    assert_eq!(r.seed, 7);
    assert_eq!(format!("{:?}", r.readings.i4), "Intro");
    assert_eq!(format!("{:?}", r.readings.d2w3), "A");
}

#[test]
fn timings_are_opt_in() {
    let r = json(&check("circle_m2", &["--json", "--timings"]));
    assert!(r.timings.unwrap().contains_key("total"));
}

#[test]
fn numeric_only_mode() {
    for (name, code) in [("circle_m2", 0), ("cubic_m2", 1), ("linear_p_m2", 1)] {
        let out = check(name, &["--json", "--numeric-only"]);
        assert_eq!(out.status.code(), Some(code), "{name}");
        let r = json(&out);
        assert_eq!(r.mode, Mode::NumericOnly);
        assert!(r.verdict.probable);
    }
    let text = check("circle_m2", &["--numeric-only"]);
    assert!(String::from_utf8_lossy(&text.stdout).lines().last().unwrap().starts_with("probably: "));
}

#[test]
fn oracle_flag() {
    let r = json(&check("circle_m2", &["--json", "--oracle"]));
    let o = r.oracle.unwrap();
    assert!(o.passed);
    assert_eq!(o.trajectories.len(), 20);
    let warned = check("nonflat_m2", &["--oracle"]);
    assert_eq!(warned.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&warned.stderr).contains("warning"));
}

#[test]
fn oracle_agrees_with_checker_on_flat_candidates() {
    for name in FLAT_CANDIDATES {
        let (_, sys) = load(name);
        let verdict = check_conformal(&sys).conformal;
        let oracle = numeric_circle_oracle(&sys, 20, 1e-6);
        assert_eq!(oracle.passed, verdict, "{name}");
    }
}

#[test]
fn printed_expressions_reparse() {
    for name in CORPUS {
        let (file, sys) = load(name);
        for (e, rhs) in sys.rhs().iter().zip(&file.rhs) {
            let again = parse_expression(&e.to_string(), sys.dim()).unwrap();
            assert_eq!(again.normalize(sys.dim()).unwrap(), e.normalize(sys.dim()).unwrap(), "{}", rhs.text);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let e = random_valid_expr(&mut rng, 3, 4);
        let again = parse_expression(&e.to_string(), 3).unwrap();
        assert_eq!(again.normalize(3).unwrap(), e.normalize(3).unwrap(), "{e}");
        let canon = e.normalize(3).unwrap().to_expr();
        assert_eq!(parse_expression(&canon.to_string(), 3).unwrap().normalize(3).unwrap(), e.normalize(3).unwrap());
    }
}
