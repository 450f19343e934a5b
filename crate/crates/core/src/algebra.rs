//! The arithmetic every invariant formula is written against.
//!
//! Formulas only need ring operations, rational scaling and partial
//! derivatives in the jet coordinates, so the same code runs on exact
//! canonical forms and on truncated Taylor expansions at a point.

use num_rational::BigRational;

use crate::error::Result;
use crate::expr::{RationalForm, SamplePoint, VarId};

pub trait JetScalar: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &BigRational) -> Self;
    fn partial(&self, v: VarId) -> Self;
    fn is_zero(&self) -> bool;

    fn scale_int(&self, n: i64, d: i64) -> Self {
        self.scale(&BigRational::new(n.into(), d.into()))
    }
}

impl JetScalar for RationalForm {
    fn zero_like(&self) -> Self {
        RationalForm::zero(self.dim())
    }
    fn add(&self, other: &Self) -> Self {
        RationalForm::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RationalForm::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RationalForm::mul(self, other)
    }
    fn neg(&self) -> Self {
        RationalForm::neg(self)
    }
    fn scale(&self, c: &BigRational) -> Self {
        RationalForm::scale(self, c)
    }
    fn partial(&self, v: VarId) -> Self {
        RationalForm::partial(self, v)
    }
    fn is_zero(&self) -> bool {
        RationalForm::is_zero(self)
    }
}

/// Sum of an iterator of scalars, starting from `zero`.
pub fn sum<F: JetScalar>(zero: &F, items: impl IntoIterator<Item = F>) -> F {
    items.into_iter().fold(zero.zero_like(), |acc, x| acc.add(&x))
}

/// Scalars that can be evaluated exactly at a rational point.
pub trait ExactEval: JetScalar {
    fn eval_at(&self, pt: &SamplePoint) -> Result<BigRational>;
}

impl ExactEval for RationalForm {
    fn eval_at(&self, pt: &SamplePoint) -> Result<BigRational> {
        self.eval(pt.values())
    }
}
