//! Dense indexed arrays of scalars: scalar, vector, matrix and 3-tensor.
//!
//! Index convention: matrix entry `(i, j)` is `M^i_j`, 3-tensor entry
//! `(i, j, k)` is `T^i_{jk}`. For covariant derivatives the last index is the
//! derivative direction. All indices are 0-based in code.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::JetScalar;
use crate::jet::Jet;
use crate::expr::{Expr, RationalForm, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Scalar,
    Vector,
    Matrix,
    Tensor3,
}

impl Shape {
    pub fn rank(self) -> usize {
        match self {
            Shape::Scalar => 0,
            Shape::Vector => 1,
            Shape::Matrix => 2,
            Shape::Tensor3 => 3,
        }
    }

    pub fn len(self, m: usize) -> usize {
        m.pow(self.rank() as u32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<F> {
    shape: Shape,
    m: usize,
    entries: Vec<F>,
}

/// Invariant fields as exact canonical forms.
pub type TensorField = Tensor<RationalForm>;

impl<F> Tensor<F> {
    pub fn build(shape: Shape, m: usize, mut f: impl FnMut(&[usize]) -> F) -> Self {
        let mut entries = Vec::with_capacity(shape.len(m));
        for idx in indices(shape, m) {
            entries.push(f(&idx));
        }
        Tensor { shape, m, entries }
    }

    pub fn scalar(value: F, m: usize) -> Self {
        Tensor { shape: Shape::Scalar, m, entries: vec![value] }
    }

    pub fn vector(m: usize, f: impl FnMut(&[usize]) -> F) -> Self {
        Self::build(Shape::Vector, m, f)
    }

    pub fn matrix(m: usize, f: impl FnMut(&[usize]) -> F) -> Self {
        Self::build(Shape::Matrix, m, f)
    }

    pub fn tensor3(m: usize, f: impl FnMut(&[usize]) -> F) -> Self {
        Self::build(Shape::Tensor3, m, f)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.shape.rank(), "index rank mismatch");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.m, "index out of range");
            acc * self.m + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &F {
        &self.entries[self.offset(idx)]
    }

    pub fn value(&self) -> &F {
        self.get(&[])
    }

    pub fn at(&self, i: usize) -> &F {
        self.get(&[i])
    }

    pub fn at2(&self, i: usize, j: usize) -> &F {
        self.get(&[i, j])
    }

    pub fn at3(&self, i: usize, j: usize, k: usize) -> &F {
        self.get(&[i, j, k])
    }

    /// Entries paired with their index tuples, in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &F)> {
        indices(self.shape, self.m).into_iter().zip(self.entries.iter())
    }

    pub fn map<G>(&self, f: impl FnMut(&F) -> G) -> Tensor<G> {
        Tensor { shape: self.shape, m: self.m, entries: self.entries.iter().map(f).collect() }
    }
}

/// All index tuples of a shape in row-major order.
pub fn indices(shape: Shape, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..shape.rank() {
        out = out
            .into_iter()
            .flat_map(|idx| {
                (0..m).map(move |i| {
                    let mut v = idx.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

impl<F: JetScalar> Tensor<F> {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// First entry that is not identically zero.
    pub fn first_nonzero(&self) -> Option<(Vec<usize>, &F)> {
        self.iter().find(|(_, e)| !e.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn scale_int(&self, n: i64, d: i64) -> Self {
        self.map(|e| e.scale_int(n, d))
    }

    pub fn neg_all(&self) -> Self {
        self.map(|e| e.neg())
    }

    /// Multiplies every entry by the scalar `s`.
    pub fn times(&self, s: &F) -> Self {
        self.map(|e| e.mul(s))
    }

    pub fn partial(&self, v: VarId) -> Self {
        self.map(|e| e.partial(v))
    }

    /// Entrywise total derivative.
    pub fn total(&self, jet: &Jet<F>) -> Self {
        self.map(|e| jet.total(e))
    }

    /// Matrix product.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!((self.shape, other.shape), (Shape::Matrix, Shape::Matrix));
        let m = self.m;
        Tensor::matrix(m, |ix| {
            let zero = self.entries[0].zero_like();
            (0..m).fold(zero, |acc, k| acc.add(&self.at2(ix[0], k).mul(other.at2(k, ix[1]))))
        })
    }

    pub fn transpose(&self) -> Self {
        assert_eq!(self.shape, Shape::Matrix);
        Tensor::matrix(self.m, |ix| self.at2(ix[1], ix[0]).clone())
    }

    pub fn trace(&self) -> F {
        assert_eq!(self.shape, Shape::Matrix);
        (1..self.m).fold(self.at2(0, 0).clone(), |acc, i| acc.add(self.at2(i, i)))
    }

    /// Matrix slice `(i, j) -> T^i_{jk}` for fixed `k`.
    pub fn slice_last(&self, k: usize) -> Self {
        assert_eq!(self.shape, Shape::Tensor3);
        Tensor::matrix(self.m, |ix| self.at3(ix[0], ix[1], k).clone())
    }

    fn zip(&self, other: &Self, mut f: impl FnMut(&F, &F) -> F) -> Self {
        assert_eq!((self.shape, self.m), (other.shape, other.m), "shape mismatch");
        Tensor {
            shape: self.shape,
            m: self.m,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl Tensor<RationalForm> {
    pub fn to_exprs(&self) -> Tensor<Expr> {
        self.map(RationalForm::to_expr)
    }
}
