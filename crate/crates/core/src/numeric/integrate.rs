//! Adaptive Dormand–Prince integration of a third-order system written as
//! a first-order system in `(y, p, q)`.

use std::cell::Cell;
use std::rc::Rc;

use ode_solvers::dopri5::Dopri5;
use ode_solvers::{DVector, System};

use crate::jet::OdeSystem;

pub const TOLERANCE: f64 = 1e-10;

/// Uniformly resampled trajectory. `states[k]` is `(y, p, q)` at `xs[k]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub m: usize,
    pub xs: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn y(&self, k: usize) -> &[f64] {
        &self.states[k][..self.m]
    }

    pub fn p(&self, k: usize) -> &[f64] {
        &self.states[k][self.m..2 * self.m]
    }

    pub fn q(&self, k: usize) -> &[f64] {
        &self.states[k][2 * self.m..]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IntegrationFailure {
    Pole { x: f64 },
    Solver(String),
}

impl std::fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IntegrationFailure::Pole { x } => write!(f, "pole encountered near x = {x}"),
            IntegrationFailure::Solver(s) => write!(f, "{s}"),
        }
    }
}

/// The system in the local parameter `s = (x - x0) / sigma`, which always
/// runs forward from zero as the dense output of the stepper expects.
struct Rhs<'a> {
    sys: &'a OdeSystem,
    x0: f64,
    sigma: f64,
    pole: Rc<Cell<Option<f64>>>,
}

impl System<f64, DVector<f64>> for Rhs<'_> {
    fn system(&self, t: f64, s: &DVector<f64>, ds: &mut DVector<f64>) {
        let m = self.sys.dim();
        let x = self.x0 + self.sigma * t;
        let s = s.as_slice();
        match self.sys.eval_rhs_f64(x, &s[..m], &s[m..2 * m], &s[2 * m..]) {
            Some(f) => {
                for i in 0..2 * m {
                    ds[i] = self.sigma * s[m + i];
                }
                for i in 0..m {
                    ds[2 * m + i] = self.sigma * f[i];
                }
            }
            None => {
                if self.pole.get().is_none() {
                    self.pole.set(Some(x));
                }
                ds.fill(0.0);
            }
        }
    }

    fn solout(&mut self, _x: f64, _y: &DVector<f64>, _dy: &DVector<f64>) -> bool {
        self.pole.get().is_some()
    }
}

/// Integrates from `x0` with initial state `(y, p, q)` to `x1`, sampling
/// every `|dx|` through the dense output. `x1 < x0` integrates backwards.
pub fn integrate(
    sys: &OdeSystem,
    x0: f64,
    state: &[f64],
    x1: f64,
    dx: f64,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let m = sys.dim();
    assert_eq!(state.len(), 3 * m);
    let pole = Rc::new(Cell::new(None));
    let sigma = if x1 < x0 { -1.0 } else { 1.0 };
    let rhs = Rhs { sys, x0, sigma, pole: pole.clone() };
    let length = (x1 - x0).abs();
    let mut stepper = Dopri5::new(rhs, 0.0, length, dx.abs(), DVector::from_column_slice(state), TOLERANCE, TOLERANCE);
    let outcome = stepper.integrate();
    if let Some(t) = pole.get() {
        return Err(IntegrationFailure::Pole { x: x0 + sigma * t });
    }
    outcome.map_err(|e| IntegrationFailure::Solver(e.to_string()))?;
    let (xs, ys) = stepper.results().get();
    let states: Vec<Vec<f64>> = ys.iter().map(|v| v.as_slice().to_vec()).collect();
    if states.iter().flatten().any(|v| !v.is_finite()) {
        return Err(IntegrationFailure::Solver("non-finite state".into()));
    }
    Ok(Trajectory { m, xs: xs.iter().map(|t| x0 + sigma * t).collect(), states })
}
