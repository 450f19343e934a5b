//! Exact rational-function arithmetic in the jet variables.

mod gcd;
mod poly;
mod rational;
mod sample;
mod tree;
mod var;

pub use gcd::gcd;
pub use poly::{Monomial, Poly, MAX_EXPONENT};
pub use rational::RationalForm;
pub use sample::{random_rational, SamplePoint};
pub use tree::{Expr, ExprNode, POLE_RESAMPLES, ZERO_TEST_POINTS};
pub use var::{nvars, VarId, MAX_DIM};
