use std::fmt;

use crate::error::{Error, Result};

/// Largest system dimension supported by the packed monomial encoding
/// (3m+1 variables, one byte each, in a `u128`).
pub const MAX_DIM: usize = 5;

/// A jet coordinate: `x`, `y_i`, `p_i = y_i'` or `q_i = y_i''` with `1 <= i <= m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    X,
    Y(usize),
    P(usize),
    Q(usize),
}

impl VarId {
    pub fn index(self) -> Option<usize> {
        match self {
            VarId::X => None,
            VarId::Y(i) | VarId::P(i) | VarId::Q(i) => Some(i),
        }
    }

    /// Position in the canonical variable order `x < y1 < .. < ym < p1 < .. < qm`.
    pub fn slot(self, m: usize) -> usize {
        match self {
            VarId::X => 0,
            VarId::Y(i) => i,
            VarId::P(i) => m + i,
            VarId::Q(i) => 2 * m + i,
        }
    }

    pub fn from_slot(slot: usize, m: usize) -> VarId {
        match slot {
            0 => VarId::X,
            s if s <= m => VarId::Y(s),
            s if s <= 2 * m => VarId::P(s - m),
            s => VarId::Q(s - 2 * m),
        }
    }

    pub fn check(self, m: usize) -> Result<()> {
        match self.index() {
            None => Ok(()),
            Some(i) if i >= 1 && i <= m => Ok(()),
            Some(_) => Err(Error::IndexOutOfRange { var: self.to_string(), m }),
        }
    }

    /// All `3m+1` coordinates in canonical order.
    pub fn all(m: usize) -> Vec<VarId> {
        (0..nvars(m)).map(|s| VarId::from_slot(s, m)).collect()
    }
}

pub fn nvars(m: usize) -> usize {
    3 * m + 1
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::X => write!(f, "x"),
            VarId::Y(i) => write!(f, "y{i}"),
            VarId::P(i) => write!(f, "p{i}"),
            VarId::Q(i) => write!(f, "q{i}"),
        }
    }
}
