#![allow(dead_code)]

pub mod fd;

use std::path::PathBuf;

use cgode::expr::VarId;
use cgode::frontend::{read_system_file, SystemFile};
use cgode::{Expr, OdeSystem};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.ode"))
}

pub fn load(name: &str) -> (SystemFile, OdeSystem) {
    let file = read_system_file(&corpus_path(name)).unwrap();
    let sys = file.to_system().unwrap();
    (file, sys)
}

/// Every well-formed corpus system, cheap enough for the debug test profile.
pub const CORPUS: [&str; 6] = ["circle_m2", "circle_m3", "zero_m2", "linear_p_m2", "cubic_m2", "nonflat_m2"];

/// Corpus members that are candidates for the flat model.
pub const FLAT_CANDIDATES: [&str; 5] = ["circle_m2", "circle_m3", "zero_m2", "linear_p_m2", "cubic_m2"];

pub fn circle(m: usize) -> OdeSystem {
    let pq = Expr::sum((1..=m).map(|i| Expr::p(i) * Expr::q(i)).collect());
    let den = Expr::sum(std::iter::once(Expr::one()).chain((1..=m).map(|i| Expr::pow(Expr::p(i), 2))).collect());
    OdeSystem::new(m, (1..=m).map(|i| Expr::int(3) * Expr::q(i) * pq.clone() / den.clone()).collect()).unwrap()
}

pub fn system(m: usize, rhs: &[&str]) -> OdeSystem {
    OdeSystem::new(m, rhs.iter().map(|s| cgode::frontend::parse_expression(s, m).unwrap()).collect()).unwrap()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn leaf<R: Rng>(rng: &mut R, m: usize) -> Expr {
    if rng.gen_bool(0.65) {
        let slot = rng.gen_range(0..3 * m + 1);
        Expr::var(VarId::from_slot(slot, m))
    } else {
        Expr::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
    }
}

/// Random expression tree. With `pole_free`, every denominator has the
/// form `1 + e^2` and exponents are non-negative.
pub fn random_expr<R: Rng>(rng: &mut R, m: usize, depth: u32, pole_free: bool) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, m);
    }
    let sub = |rng: &mut R| random_expr(rng, m, depth - 1, pole_free);
    match rng.gen_range(0..6) {
        0 | 1 => {
            let n = rng.gen_range(2..=3);
            Expr::sum((0..n).map(|_| sub(rng)).collect())
        }
        2 => Expr::product(vec![sub(rng), sub(rng)]),
        3 => {
            let e = if pole_free { rng.gen_range(0..=3) } else { rng.gen_range(-2..=3) };
            Expr::pow(sub(rng), e)
        }
        4 => {
            let num = sub(rng);
            let den = if pole_free { Expr::one() + Expr::pow(sub(rng), 2) } else { sub(rng) };
            Expr::quotient(num, den)
        }
        _ => sub(rng) - sub(rng),
    }
}

/// Random expression with a canonical form (no identically zero denominator).
pub fn random_valid_expr<R: Rng>(rng: &mut R, m: usize, depth: u32) -> Expr {
    loop {
        let e = random_expr(rng, m, depth, false);
        if e.normalize(m).is_ok() {
            return e;
        }
    }
}

pub fn to_f64(v: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap()
}

/// `|a - b| / max(|a|, |b|, 1)`; below unit magnitude this is an absolute error.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Random polynomial of degree at most two in `x`, `y`, `p`.
pub fn coefficient<R: Rng>(rng: &mut R, m: usize) -> String {
    let v = |rng: &mut R| {
        let names = ["x".to_string()]
            .into_iter()
            .chain((1..=m).flat_map(|i| [format!("y{i}"), format!("p{i}")]))
            .collect::<Vec<_>>();
        names[rng.gen_range(0..names.len())].clone()
    };
    let mut terms = vec![format!("{}", rng.gen_range(-3..=3))];
    for _ in 0..rng.gen_range(0..=2) {
        terms.push(format!("{}*{}", rng.gen_range(-3..=3), v(rng)));
    }
    if rng.gen_bool(0.5) {
        terms.push(format!("{}*{}*{}", rng.gen_range(-2..=2), v(rng), v(rng)));
    }
    format!("({})", terms.join(" + "))
}

/// `f^i = 3 q_i (A . q) + B^i_j q_j + C_i` with polynomial coefficients.
pub fn quadratic_family<R: Rng>(rng: &mut R, m: usize) -> OdeSystem {
    system(m, &quadratic_family_rhs(rng, m).iter().map(|s| s.as_str()).collect::<Vec<_>>())
}

/// Right-hand sides of [`quadratic_family`] as text.
pub fn quadratic_family_rhs<R: Rng>(rng: &mut R, m: usize) -> Vec<String> {
    let a: Vec<String> = (0..m).map(|_| coefficient(rng, m)).collect();
    let aq: Vec<String> = (0..m).map(|j| format!("{}*q{}", a[j], j + 1)).collect();
    (1..=m)
        .map(|i| {
            let bq: Vec<String> = (1..=m).map(|j| format!("{}*q{j}", coefficient(rng, m))).collect();
            format!("3*q{i}*({}) + {} + {}", aq.join(" + "), bq.join(" + "), coefficient(rng, m))
        })
        .collect()
}

/// Expressions of which a good share are identically zero in disguise.
pub fn zero_test_candidate<R: Rng>(rng: &mut R, m: usize) -> Expr {
    let var = |rng: &mut R| Expr::var(VarId::from_slot(rng.gen_range(0..3 * m + 1), m));
    let a = random_valid_expr(rng, m, 3);
    let b = random_valid_expr(rng, m, 2);
    match rng.gen_range(0..6) {
        0 => a,
        1 => a.clone() - a.normalize(m).unwrap().to_expr(),
        2 => a.clone() * b.clone() - b * a,
        3 => Expr::pow(a.clone() + b.clone(), 2) - Expr::pow(a.clone(), 2) - Expr::int(2) * a * b.clone() - Expr::pow(b, 2),
        4 => a.clone() - a.normalize(m).unwrap().to_expr() + Expr::ratio(1, 1_000_003) * var(rng),
        _ => {
            let v = VarId::from_slot(rng.gen_range(0..3 * m + 1), m);
            (a.clone() * b.clone()).partial(v) - a.clone() * b.partial(v) - b * a.partial(v)
        }
    }
}
