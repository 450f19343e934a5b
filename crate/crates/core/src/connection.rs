//! Coefficients of the characteristic Cartan connection in the fixed gauge.

use crate::algebra::JetScalar;
use crate::analysis::{analysis, Analysis, Hm2Reading};
use crate::expr::{RationalForm, VarId};
use crate::jet::OdeSystem;
use crate::tensor::Tensor;

/// Matrices are `X^i_j`, vectors `X_j`, 3-tensors `G^i_{jk}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCoeffs<F> {
    pub a: Tensor<F>,
    pub b: Tensor<F>,
    pub c: Tensor<F>,
    pub e: Tensor<F>,
    pub fm2: Tensor<F>,
    pub fm3: Tensor<F>,
    pub gx: Tensor<F>,
    pub gm2: Tensor<F>,
    pub gm3: Tensor<F>,
    pub hx: Tensor<F>,
    pub hm1: Tensor<F>,
    pub hm2: Tensor<F>,
    pub hm3: Tensor<F>,
}

impl<F> ConnectionCoeffs<F> {
    /// Coefficient families by name, in declaration order.
    pub fn named(&self) -> Vec<(&'static str, &Tensor<F>)> {
        vec![
            ("A", &self.a),
            ("B", &self.b),
            ("C", &self.c),
            ("E", &self.e),
            ("Fm2", &self.fm2),
            ("Fm3", &self.fm3),
            ("Gx", &self.gx),
            ("Gm2", &self.gm2),
            ("Gm3", &self.gm3),
            ("Hx", &self.hx),
            ("Hm1", &self.hm1),
            ("Hm2", &self.hm2),
            ("Hm3", &self.hm3),
        ]
    }
}

/// Coefficients with the corrected `H^{-2}`.
pub fn connection_coefficients(sys: &OdeSystem) -> ConnectionCoeffs<RationalForm> {
    connection_coefficients_with(sys, Hm2Reading::Corrected)
}

pub fn connection_coefficients_with(sys: &OdeSystem, reading: Hm2Reading) -> ConnectionCoeffs<RationalForm> {
    analysis(sys).connection(reading).clone()
}

/// `sum_k H^{-1}_k df^k/dq^j`
fn hm1_fq<F: JetScalar>(a: &Analysis<F>) -> Tensor<F> {
    let (hm1, fq) = (a.hm1(), a.fq());
    Tensor::vector(a.dim(), |ix| (0..a.dim()).fold(a.zero(), |acc, k| acc.add(&hm1.at(k).mul(fq.at2(k, ix[0])))))
}

pub(crate) fn compute_hm2<F: JetScalar>(a: &Analysis<F>, reading: Hm2Reading) -> Tensor<F> {
    let m = a.dim();
    let (hx, hm1, fq) = (a.hx().value(), a.hm1(), a.fq());
    let tail = match reading {
        Hm2Reading::Corrected => hm1_fq(a),
        Hm2Reading::Literal => {
            let s = (0..m).fold(a.zero(), |acc, k| acc.add(&hm1.at(k).mul(fq.at2(k, k))));
            Tensor::vector(m, |_| s.clone())
        }
    };
    Tensor::vector(m, |ix| {
        let j = ix[0];
        hx.partial(VarId::Q(j + 1)).sub(&a.total(hm1.at(j))).sub(tail.at(j))
    })
}

pub(crate) fn compute<F: JetScalar>(a: &Analysis<F>, reading: Hm2Reading) -> ConnectionCoeffs<F> {
    let m = a.dim();
    let mi = m as i64;
    let (fq, fp, fqq) = (a.fq(), a.fp(), a.fqq());
    let hx = a.hx().clone();
    let hm1 = a.hm1().clone();
    let hm2 = a.hm2(reading).clone();
    let t = a.q_trace();
    let h1fq = hm1_fq(a);

    let am = fq.scale_int(-1, 3);
    let b = fq.scale_int(-2, 3);
    let gx = am.clone();
    let two_hx = hx.value().scale_int(2, 1);
    let c0 = fp.neg_all().add(&a.dfq().scale_int(2, 3)).sub(&a.fq2().scale_int(2, 9));
    let c = Tensor::matrix(m, |ix| {
        let e = c0.at2(ix[0], ix[1]);
        if ix[0] == ix[1] {
            e.sub(&two_hx)
        } else {
            e.clone()
        }
    });
    let e = t.scale_int(-1, 3 * (mi + 1));
    let fm2 = t.scale_int(1, 6 * (mi + 1));
    let fm3 = Tensor::vector(m, |ix| {
        let j = ix[0];
        hx.value()
            .partial(VarId::Q(j + 1))
            .sub(h1fq.at(j))
            .sub(&a.total(t.at(j)).scale_int(1, 3 * (mi + 1)))
    });
    let gm2 = fqq.scale_int(-1, 3);
    let gm3 = Tensor::tensor3(m, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut acc = fq.at2(i, j).partial(VarId::P(k + 1)).scale_int(-1, 3).sub(&a.total(gm2.at3(i, j, k)));
        for l in 0..m {
            acc = acc.sub(&gx.at2(i, l).mul(gm2.at3(l, j, k))).add(&gm2.at3(i, l, k).mul(gx.at2(l, j)));
        }
        acc
    });
    let hm3 = Tensor::vector(m, |ix| {
        let j = ix[0];
        hx.value()
            .partial(VarId::P(j + 1))
            .sub(&a.total(hm2.at(j)))
            .sub(h1fq.at(j))
            .sub(&hx.value().mul(hm1.at(j)).scale_int(2, 1))
    });
    ConnectionCoeffs { a: am, b, c, e, fm2, fm3, gx, gm2, gm3, hx, hm1, hm2, hm3 }
}
