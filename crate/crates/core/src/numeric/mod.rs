//! Numeric companions to the exact pipeline: randomized scalars for the
//! probabilistic checker, ODE integration and the flat-model oracle.

pub mod integrate;
pub mod oracle;
pub mod probe;

pub use integrate::{integrate, IntegrationFailure, Trajectory};
pub use oracle::{numeric_circle_oracle, numeric_circle_oracle_seeded, OracleReport, TrajectoryOutcome};
pub use probe::{Probe, ProbeContext};
