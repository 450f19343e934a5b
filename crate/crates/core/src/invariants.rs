//! The fundamental invariants `I2`, `W2`, `W3`, `I4` and the auxiliary
//! fields `H^x`, `H^{-1}`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::JetScalar;
use crate::analysis::{analysis, Analysis, CubeConvention, Hm2Reading, I4Variant};
use crate::error::{Error, Result};
use crate::expr::{RationalForm, VarId};
use crate::jet::OdeSystem;
use crate::tensor::{Shape, Tensor, TensorField};

/// `(H^x, H^{-1})`.
pub fn h_fields(sys: &OdeSystem) -> (TensorField, TensorField) {
    let a = analysis(sys);
    (a.hx().clone(), a.hm1().clone())
}

/// `M - (tr M / m) Id`.
pub fn trace_free_matrix<F: JetScalar>(mat: &Tensor<F>) -> Tensor<F> {
    assert_eq!(mat.shape(), Shape::Matrix, "trace_free_matrix needs a matrix");
    let m = mat.dim();
    let t = mat.trace().scale(&BigRational::new(BigInt::from(1), BigInt::from(m)));
    Tensor::matrix(m, |ix| {
        let e = mat.at2(ix[0], ix[1]);
        if ix[0] == ix[1] {
            e.sub(&t)
        } else {
            e.clone()
        }
    })
}

/// `T^i_{jk} - (T_j delta^i_k + T_k delta^i_j) / (m+1)` with `T_j = T^i_{ij}`.
/// The input must be symmetric in its lower indices.
pub fn trace_free_sym3<F: JetScalar>(t: &Tensor<F>) -> Result<Tensor<F>> {
    if t.shape() != Shape::Tensor3 {
        return Err(Error::InvalidInput("trace_free_sym3 needs a 3-tensor".into()));
    }
    let m = t.dim();
    for i in 0..m {
        for j in 0..m {
            for k in j + 1..m {
                if !t.at3(i, j, k).sub(t.at3(i, k, j)).is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "tensor is not symmetric in its lower indices at ({}, {}, {})",
                        i + 1,
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
    }
    Ok(trace_free_sym3_unchecked(t))
}

fn trace_free_sym3_unchecked<F: JetScalar>(t: &Tensor<F>) -> Tensor<F> {
    let m = t.dim();
    let tr: Vec<F> = (0..m).map(|j| (1..m).fold(t.at3(0, 0, j).clone(), |acc, i| acc.add(t.at3(i, i, j)))).collect();
    let c = BigRational::new(BigInt::from(1), BigInt::from(m + 1));
    Tensor::tensor3(m, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut e = t.at3(i, j, k).clone();
        if i == k {
            e = e.sub(&tr[j].scale(&c));
        }
        if i == j {
            e = e.sub(&tr[k].scale(&c));
        }
        e
    })
}

pub fn invariant_i2(sys: &OdeSystem) -> TensorField {
    analysis(sys).i2().clone()
}

pub fn invariant_w2(sys: &OdeSystem) -> TensorField {
    analysis(sys).w2().clone()
}

pub fn invariant_w3(sys: &OdeSystem) -> TensorField {
    invariant_w3_with(sys, CubeConvention::Matrix)
}

pub fn invariant_w3_with(sys: &OdeSystem, cube: CubeConvention) -> TensorField {
    analysis(sys).w3(cube).clone()
}

/// The connection variant uses the corrected `H^{-2}`.
pub fn invariant_i4(sys: &OdeSystem, variant: I4Variant) -> TensorField {
    invariant_i4_with(sys, variant, Hm2Reading::Corrected)
}

pub fn invariant_i4_with(sys: &OdeSystem, variant: I4Variant, reading: Hm2Reading) -> TensorField {
    analysis(sys).i4(variant, reading).clone()
}

pub(crate) fn compute_hm1<F: JetScalar>(a: &Analysis<F>) -> Tensor<F> {
    let m = a.dim() as i64;
    a.q_trace().scale_int(1, 6 * (m + 1))
}

pub(crate) fn compute_hx<F: JetScalar>(a: &Analysis<F>) -> Tensor<F> {
    let m = a.dim() as i64;
    let inner = a.fp().trace().sub(&a.total(&a.fq().trace())).add(&a.fq2().trace().scale_int(1, 3));
    Tensor::scalar(inner.scale_int(-1, 4 * m), a.dim())
}

pub(crate) fn compute_w2<F: JetScalar>(a: &Analysis<F>) -> Tensor<F> {
    trace_free_matrix(&a.fp().sub(a.dfq()).add(&a.fq2().scale_int(1, 3)))
}

pub(crate) fn compute_w3<F: JetScalar>(a: &Analysis<F>, cube: CubeConvention) -> Tensor<F> {
    let m = a.dim();
    let jet = a.jet();
    let (fq, fp, dfq) = (a.fq(), a.fp(), a.dfq());
    let cubed = match cube {
        CubeConvention::Matrix => a.fq2().matmul(fq),
        CubeConvention::Entrywise => fq.map(|e| e.mul(e).mul(e)),
    };
    let dhx = a.total(a.hx().value()).scale_int(2, 1);
    let body = a
        .fy()
        .add(&fq.matmul(fp).scale_int(1, 3))
        .sub(&fp.total(jet))
        .add(&dfq.total(jet).scale_int(2, 3))
        .add(&cubed.scale_int(2, 27))
        .sub(&fq.matmul(dfq).scale_int(4, 9))
        .sub(&dfq.matmul(fq).scale_int(2, 9));
    Tensor::matrix(m, |ix| {
        let e = body.at2(ix[0], ix[1]);
        if ix[0] == ix[1] {
            e.sub(&dhx)
        } else {
            e.clone()
        }
    })
}

pub(crate) fn compute_i2<F: JetScalar>(a: &Analysis<F>) -> Tensor<F> {
    // Mixed partials commute, so the Hessian is symmetric by construction.
    trace_free_sym3_unchecked(a.fqq())
}

fn i4_common<F: JetScalar>(a: &Analysis<F>, j: usize, k: usize) -> F {
    let hm1 = a.hm1();
    hm1.at(k).partial(VarId::P(j + 1)).neg().add(&hm1.at(j).mul(hm1.at(k)).scale_int(2, 1))
}

/// `-dH^{-1}_k/dp^j + dH^{-2}_j/dq^k + 2 H^{-1}_j H^{-1}_k`
pub(crate) fn compute_i4_connection<F: JetScalar>(a: &Analysis<F>, reading: Hm2Reading) -> Tensor<F> {
    let hm2 = a.hm2(reading);
    Tensor::matrix(a.dim(), |ix| i4_common(a, ix[0], ix[1]).add(&hm2.at(ix[0]).partial(VarId::Q(ix[1] + 1))))
}

/// Expanded form with `H^{-2}` written out in terms of `H^x` and `H^{-1}`.
pub(crate) fn compute_i4_intro<F: JetScalar>(a: &Analysis<F>) -> Tensor<F> {
    let m = a.dim();
    let (hm1, hx, fq) = (a.hm1(), a.hx().value(), a.fq());
    let dhm1: Vec<F> = (0..m).map(|j| a.total(hm1.at(j))).collect();
    let contracted: Vec<F> =
        (0..m).map(|j| (0..m).fold(a.zero(), |acc, l| acc.add(&hm1.at(l).mul(fq.at2(l, j))))).collect();
    Tensor::matrix(m, |ix| {
        let (j, k) = (ix[0], ix[1]);
        let qk = VarId::Q(k + 1);
        i4_common(a, j, k)
            .add(&hx.partial(VarId::Q(j + 1)).partial(qk))
            .sub(&dhm1[j].partial(qk))
            .sub(&contracted[j].partial(qk))
    })
}

/// `f^i = 3 q_i (A . q) + B^i_j q_j + C_i` with coefficients free of `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFormDecomposition {
    pub a: TensorField,
    pub b: TensorField,
    pub c: TensorField,
}

impl QuadraticFormDecomposition {
    /// Right-hand sides rebuilt from the coefficients.
    pub fn reassemble(&self) -> Vec<RationalForm> {
        let m = self.a.dim();
        let q = |i: usize| RationalForm::var(m, VarId::Q(i + 1));
        let aq = (0..m).fold(RationalForm::zero(m), |acc, j| acc.add(&self.a.at(j).mul(&q(j))));
        (0..m)
            .map(|i| {
                let bq = (0..m).fold(RationalForm::zero(m), |acc, j| acc.add(&self.b.at2(i, j).mul(&q(j))));
                q(i).mul(&aq).scale_int(3, 1).add(&bq).add(self.c.at(i))
            })
            .collect()
    }
}

/// Matches the normal form of systems with vanishing `I2`.
pub fn match_i2_zero_form(sys: &OdeSystem) -> Option<QuadraticFormDecomposition> {
    let m = sys.dim();
    let f = sys.rhs_forms();
    let q_free = |e: &RationalForm| (1..=m).all(|i| e.degree_in(VarId::Q(i)) == (0, 0));
    if f.iter().any(|fi| (1..=m).any(|i| fi.degree_in(VarId::Q(i)).1 > 0)) {
        return None;
    }
    let zero_q = |e: &RationalForm| -> RationalForm {
        let mut vals: Vec<RationalForm> = VarId::all(m).into_iter().map(|v| RationalForm::var(m, v)).collect();
        for i in 1..=m {
            vals[VarId::Q(i).slot(m)] = RationalForm::zero(m);
        }
        e.compose(&vals).expect("polynomial in q has no pole at q = 0")
    };
    let c = Tensor::vector(m, |ix| zero_q(&f[ix[0]]));
    let b = Tensor::matrix(m, |ix| zero_q(&f[ix[0]].partial(VarId::Q(ix[1] + 1))));
    // Hessian entry (i, i, j) of 3 q_i (A.q) is 6 A_j when j = i and 3 A_j otherwise.
    let a = Tensor::vector(m, |ix| {
        let j = ix[0];
        let i = if j == 0 { 1 } else { 0 };
        f[i].partial(VarId::Q(i + 1)).partial(VarId::Q(j + 1)).scale_int(1, 3)
    });
    if ![&a, &b, &c].iter().all(|t| t.entries().iter().all(q_free)) {
        return None;
    }
    let dec = QuadraticFormDecomposition { a, b, c };
    (dec.reassemble() == f).then_some(dec)
}
