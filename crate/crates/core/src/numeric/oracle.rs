//! Flat-model check: integrated solutions of a conformally flat system
//! are circles or lines in `(x, y)` space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrate::{integrate, Trajectory};
use crate::jet::OdeSystem;

pub const SAMPLE_STEP: f64 = 1.0 / 200.0;
pub const LENGTH: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOutcome {
    /// `(y, p, q)` at `x = 0`.
    pub initial: Vec<f64>,
    pub curvature_deviation: Option<f64>,
    pub max_torsion: Option<f64>,
    pub skipped: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub tolerance: f64,
    pub trajectories: Vec<TrajectoryOutcome>,
    pub passed: bool,
}

impl OracleReport {
    pub fn skipped(&self) -> usize {
        self.trajectories.iter().filter(|t| t.skipped.is_some()).count()
    }
}

pub fn numeric_circle_oracle(sys: &OdeSystem, n_trajectories: usize, tolerance: f64) -> OracleReport {
    numeric_circle_oracle_seeded(sys, n_trajectories, tolerance, 0)
}

pub fn numeric_circle_oracle_seeded(sys: &OdeSystem, n_trajectories: usize, tolerance: f64, seed: u64) -> OracleReport {
    let m = sys.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initials: Vec<Vec<f64>> = (0..n_trajectories)
        .map(|_| {
            let mut s: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            s.extend((0..m).map(|_| rng.gen_range(-0.5..0.5)));
            // larger curvatures turn the tangent vertical within unit length
            s.extend((0..m).map(|_| rng.gen_range(-0.25..0.25)));
            s
        })
        .collect();
    let trajectories: Vec<TrajectoryOutcome> =
        initials.par_iter().map(|s| trajectory_outcome(sys, s, tolerance)).collect();
    let usable = trajectories.iter().filter(|t| t.skipped.is_none()).count();
    let passed = usable > 0 && trajectories.iter().all(|t| t.passed || t.skipped.is_some());
    OracleReport { tolerance, trajectories, passed }
}

pub fn trajectory_outcome(sys: &OdeSystem, initial: &[f64], tolerance: f64) -> TrajectoryOutcome {
    match integrate(sys, 0.0, initial, LENGTH, SAMPLE_STEP) {
        Err(e) => TrajectoryOutcome {
            initial: initial.to_vec(),
            curvature_deviation: None,
            max_torsion: None,
            skipped: Some(e.to_string()),
            passed: false,
        },
        Ok(t) => {
            let (dev, tors) = curve_shape(&t);
            TrajectoryOutcome {
                initial: initial.to_vec(),
                curvature_deviation: Some(dev),
                max_torsion: Some(tors),
                skipped: None,
                passed: dev < tolerance && tors < tolerance,
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Max deviation of curvature from its mean, and max |torsion|.
pub fn curve_shape(t: &Trajectory) -> (f64, f64) {
    let n = t.xs.len();
    let lift = |v: &[f64], lead: f64| {
        let mut out = vec![lead];
        out.extend_from_slice(v);
        out
    };
    let frame = |k: usize| {
        let r1 = lift(t.p(k), 1.0);
        let r2 = lift(t.q(k), 0.0);
        let n1 = dot(&r1, &r1).sqrt();
        let e1: Vec<f64> = r1.iter().map(|v| v / n1).collect();
        let mut u = r2.clone();
        axpy(-dot(&r2, &e1), &e1, &mut u);
        (n1, e1, u)
    };
    let curvature: Vec<f64> = (0..n)
        .map(|k| {
            let (n1, _, u) = frame(k);
            dot(&u, &u).sqrt() / (n1 * n1)
        })
        .collect();
    let mean = curvature.iter().sum::<f64>() / n as f64;
    let deviation = curvature.iter().map(|c| (c - mean).abs()).fold(0.0, f64::max);

    let h = SAMPLE_STEP;
    let mut torsion = 0.0f64;
    for k in 2..n.saturating_sub(2) {
        if ((t.xs[k + 2] - t.xs[k - 2]) - 4.0 * h).abs() > 1e-9 {
            continue;
        }
        let dq: Vec<f64> = (0..t.m)
            .map(|i| (-t.q(k + 2)[i] + 8.0 * t.q(k + 1)[i] - 8.0 * t.q(k - 1)[i] + t.q(k - 2)[i]) / (12.0 * h))
            .collect();
        let (n1, e1, u) = frame(k);
        let nu = dot(&u, &u).sqrt();
        if nu < 1e-9 {
            continue;
        }
        let e2: Vec<f64> = u.iter().map(|v| v / nu).collect();
        let mut r3 = lift(&dq, 0.0);
        let (c1, c2) = (dot(&r3, &e1), dot(&r3, &e2));
        axpy(-c1, &e1, &mut r3);
        axpy(-c2, &e2, &mut r3);
        torsion = torsion.max(dot(&r3, &r3).sqrt() / (n1 * nu));
    }
    (deviation, torsion)
}
