//! Covariant derivatives of the Wilczynski invariants, the seven explicit
//! conditions, the rank requirement on `I4` and the final verdict.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{ExactEval, JetScalar};
use crate::analysis::{analysis, Analysis, CubeConvention, D2W3Variant, Hm2Reading, I4Variant, Readings};
use crate::expr::{RationalForm, SamplePoint, VarId};
use crate::invariants::trace_free_matrix;
use crate::jet::{Jet, OdeSystem};
use crate::numeric::{Probe, ProbeContext};
use crate::tensor::{Shape, Tensor};

/// Attempts at finding a sample point where a residual is nonzero.
pub const WITNESS_TRIES: usize = 100;
/// Points at which `det I4` is sampled.
pub const RANK_SAMPLES: usize = 10;

/// Index layout `(i, j, k)`: entry `(W)^i_j` differentiated along direction `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantDerivs<F> {
    pub d1w2: Tensor<F>,
    pub d1w3: Tensor<F>,
    pub d2w2: Tensor<F>,
    pub d2w3_a: Tensor<F>,
    pub d2w3_b: Tensor<F>,
}

impl<F> CovariantDerivs<F> {
    pub fn d2w3(&self, v: D2W3Variant) -> &Tensor<F> {
        match v {
            D2W3Variant::A => &self.d2w3_a,
            D2W3Variant::B => &self.d2w3_b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "1")]
    C1,
    #[serde(rename = "2")]
    C2,
    #[serde(rename = "3")]
    C3,
    #[serde(rename = "4")]
    C4,
    #[serde(rename = "5")]
    C5,
    #[serde(rename = "6")]
    C6,
    #[serde(rename = "7")]
    C7,
    #[serde(rename = "rank")]
    Rank,
}

impl ConditionId {
    pub const NUMBERED: [ConditionId; 7] = [
        ConditionId::C1,
        ConditionId::C2,
        ConditionId::C3,
        ConditionId::C4,
        ConditionId::C5,
        ConditionId::C6,
        ConditionId::C7,
    ];
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::C1 => "1",
            ConditionId::C2 => "2",
            ConditionId::C3 => "3",
            ConditionId::C4 => "4",
            ConditionId::C5 => "5",
            ConditionId::C6 => "6",
            ConditionId::C7 => "7",
            ConditionId::Rank => "rank",
        };
        f.write_str(s)
    }
}

/// A certificate that a residual does not vanish: one entry, one point, its
/// exact value there. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub index: Vec<usize>,
    pub point: SamplePoint,
    pub value: String,
}

#[derive(Clone, Debug)]
pub struct ConditionResidual<F = RationalForm> {
    pub id: ConditionId,
    pub residual: Tensor<F>,
    pub passed: bool,
    pub witness: Option<Witness>,
    /// Rank only: sample points at which `det I4` vanishes.
    pub vanishing_points: Vec<SamplePoint>,
}

/// Which readings were used and how the alternatives compare.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantLedger {
    pub readings: Readings,
    /// Normalization of the trace-free projection of `d^2 f / dq dq`.
    pub i2_normalization: String,
    pub i4_intro_equals_connection: bool,
    pub i4_symmetric: bool,
    pub hm2_readings_agree: bool,
    pub i4_literal_hm2_equals_corrected: bool,
    pub condition2_matches_covariant_form: bool,
    pub condition2_literal_indices_vanish: bool,
    pub w3_cube_conventions_agree: bool,
    pub d2w3_variants_agree: bool,
    /// Conditions 1 to 7 under each `(D_{-2} W3, H^{-2})` reading.
    pub reading_outcomes: Vec<ReadingOutcome>,
    /// Agreement of conditions 4, 5, 6 with their covariant-derivative form.
    pub covariant_forms_agree: Vec<(ConditionId, bool)>,
    /// `D_{-2} I4 = 0` and `D_{-3} I4 = 0`, evaluated when conditions 1 to 4 hold.
    pub bootstrap: Option<(bool, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadingOutcome {
    pub d2w3: D2W3Variant,
    pub hm2: Hm2Reading,
    pub annihilates: bool,
    pub failing: Vec<ConditionId>,
}

fn failing_ids<F: JetScalar>(residuals: &[Tensor<F>]) -> Vec<ConditionId> {
    residuals.iter().zip(ConditionId::NUMBERED).filter(|(t, _)| !t.is_zero()).map(|(_, id)| id).collect()
}

#[derive(Clone, Debug)]
pub struct Verdict<F = RationalForm> {
    pub conformal: bool,
    pub conditions: Vec<ConditionResidual<F>>,
    pub ledger: Option<VariantLedger>,
}

impl<F> Verdict<F> {
    pub fn failing(&self) -> Vec<ConditionId> {
        self.conditions.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }

    pub fn condition(&self, id: ConditionId) -> &ConditionResidual<F> {
        self.conditions.iter().find(|c| c.id == id).expect("every condition is reported")
    }

    pub fn text(&self) -> String {
        if self.conformal {
            "locally the equation of conformal geodesics of some conformal structure; I4 is generically non-degenerate"
                .to_string()
        } else {
            let ids: Vec<String> = self.failing().iter().map(|c| c.to_string()).collect();
            format!("not locally the equation of conformal geodesics; failing: {}", ids.join(", "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub readings: Readings,
    pub seed: u64,
    /// Also evaluate every alternative reading for the ledger.
    pub ledger: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { readings: Readings::default(), seed: 0, ledger: true }
    }
}

fn sum_over<F: JetScalar>(zero: &F, m: usize, f: impl Fn(usize) -> F) -> F {
    (0..m).fold(zero.zero_like(), |acc, l| acc.add(&f(l)))
}

fn q(k: usize) -> VarId {
    VarId::Q(k + 1)
}

fn p(k: usize) -> VarId {
    VarId::P(k + 1)
}

pub fn covariant_derivatives(sys: &OdeSystem) -> CovariantDerivs<RationalForm> {
    let r = Readings::default();
    compute_covariant(&analysis(sys), r.cube, r.hm2)
}

pub fn compute_covariant<F: JetScalar>(a: &Analysis<F>, cube: CubeConvention, hm2r: Hm2Reading) -> CovariantDerivs<F> {
    let m = a.dim();
    let z = a.zero();
    let (w2, w3, hm1) = (a.w2(), a.w3(cube), a.hm1());
    let hm2 = a.hm2(hm2r);
    let cc = a.connection(hm2r);
    let b = &cc.b;
    let d1w2 = Tensor::tensor3(m, |ix| w2.at2(ix[0], ix[1]).partial(q(ix[2])));
    let w3q = Tensor::tensor3(m, |ix| w3.at2(ix[0], ix[1]).partial(q(ix[2])));
    let d1w3 = Tensor::tensor3(m, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        w3q.at3(i, j, k).add(&hm1.at(k).mul(w2.at2(i, j)).scale_int(2, 1))
    });
    let d2w2 = Tensor::tensor3(m, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        w2.at2(i, j).partial(p(k)).sub(&hm1.at(k).mul(w2.at2(i, j)).scale_int(4, 1))
    });
    // Everything except the W2 coefficient, which depends on the variant.
    let common = Tensor::tensor3(m, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut e = w3.at2(i, j).partial(p(k));
        e = e.sub(&sum_over(&z, m, |l| w3q.at3(i, j, l).mul(b.at2(l, k))));
        e = e.sub(&hm1.at(k).mul(w3.at2(i, j)).scale_int(6, 1));
        let comm = sum_over(&z, m, |l| {
            cc.gm2.at3(i, l, k).mul(w3.at2(l, j)).sub(&w3.at2(i, l).mul(cc.gm2.at3(l, j, k)))
        });
        e.add(&comm)
    });
    let coeff_a: Vec<F> = (0..m).map(|k| hm1.at(k).sub(&sum_over(&z, m, |l| hm2.at(l).mul(b.at2(l, k))))).collect();
    let coeff_b: Vec<F> = (0..m).map(|k| hm2.at(k).sub(&sum_over(&z, m, |l| hm1.at(l).mul(b.at2(l, k))))).collect();
    let with = |c: &[F]| {
        Tensor::tensor3(m, |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            common.at3(i, j, k).add(&c[k].mul(w2.at2(i, j)).scale_int(2, 1))
        })
    };
    CovariantDerivs { d2w3_a: with(&coeff_a), d2w3_b: with(&coeff_b), d1w2, d1w3, d2w2 }
}

fn i4_of<F: JetScalar>(a: &Analysis<F>, r: &Readings) -> Tensor<F> {
    a.i4(r.i4, r.hm2).clone()
}

/// Condition 2 with `df/dq` acting on each lower index of `I4`:
/// `-1/3 fq^k_i I4_kj - 1/3 fq^k_j I4_ik - d/dx I4_ij`.
fn condition2<F: JetScalar>(a: &Analysis<F>, i4: &Tensor<F>, literal: bool) -> Tensor<F> {
    let m = a.dim();
    let z = a.zero();
    let fq = a.fq();
    Tensor::matrix(m, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let first = sum_over(&z, m, |k| {
            let g = if literal { fq.at2(i, k) } else { fq.at2(k, i) };
            g.mul(i4.at2(k, j))
        });
        let second = sum_over(&z, m, |k| fq.at2(k, j).mul(i4.at2(i, k)));
        first.add(&second).scale_int(-1, 3).sub(&a.total(i4.at2(i, j)))
    })
}

/// `G^x . I4 + I4 . G^x - d/dx I4` with `G^x` acting on a bilinear form.
pub fn condition2_covariant<F: JetScalar>(a: &Analysis<F>, i4: &Tensor<F>) -> Tensor<F> {
    let gx = &a.connection(Hm2Reading::Corrected).gx;
    gx.transpose().matmul(i4).add(&i4.matmul(gx)).sub(&i4.total(a.jet()))
}

fn condition5_body<F: JetScalar>(a: &Analysis<F>, w3: &Tensor<F>) -> Tensor<F> {
    let (w2, hm1) = (a.w2(), a.hm1());
    Tensor::tensor3(a.dim(), |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        w2.at2(i, k)
            .partial(p(j))
            .sub(&w3.at2(i, k).partial(q(j)).scale_int(2, 1))
            .add(&w3.at2(i, j).partial(q(k)))
            .sub(&hm1.at(j).mul(w2.at2(i, k)).scale_int(8, 1))
            .add(&hm1.at(k).mul(w2.at2(i, j)).scale_int(2, 1))
    })
}

/// Trace-free part in the first two indices, separately for each `k`.
fn trace_free_ij<F: JetScalar>(t: &Tensor<F>) -> Tensor<F> {
    let m = t.dim();
    let slices: Vec<Tensor<F>> = (0..m).map(|k| trace_free_matrix(&t.slice_last(k))).collect();
    Tensor::tensor3(m, |ix| slices[ix[2]].at2(ix[0], ix[1]).clone())
}

fn condition6<F: JetScalar>(a: &Analysis<F>, w3: &Tensor<F>) -> Tensor<F> {
    let m = a.dim();
    let z = a.zero();
    let inner: Vec<F> = (0..m)
        .map(|k| {
            let s1 = sum_over(&z, m, |i| w3.at2(i, k).partial(q(i)));
            let s2 = sum_over(&z, m, |i| w3.at2(i, i).partial(q(k)));
            s2.sub(&s1.scale_int(2, 1))
        })
        .collect();
    Tensor::matrix(m, |ix| inner[ix[0]].partial(q(ix[1])))
}

/// Free indices `(j, l)`.
fn condition7<F: JetScalar>(a: &Analysis<F>, w3: &Tensor<F>, i4: &Tensor<F>, d2w3: &Tensor<F>) -> Tensor<F> {
    let m = a.dim();
    let z = a.zero();
    let (w2, hm1) = (a.w2(), a.hm1());
    let bracket: Vec<F> = (0..m)
        .map(|j| {
            sum_over(&z, m, |i| {
                w2.at2(i, j)
                    .partial(p(i))
                    .sub(&w3.at2(i, j).partial(q(i)).scale_int(2, 1))
                    .add(&w3.at2(i, i).partial(q(j)))
                    .sub(&hm1.at(i).mul(w2.at2(i, j)).scale_int(8, 1))
            })
        })
        .collect();
    let inner: Vec<F> =
        (0..m).map(|j| sum_over(&z, m, |i| d2w3.at3(i, j, i).sub(d2w3.at3(i, i, j)))).collect();
    Tensor::matrix(m, |ix| {
        let (j, l) = (ix[0], ix[1]);
        hm1.at(l)
            .mul(&bracket[j])
            .neg()
            .add(&inner[j].partial(q(l)))
            .add(&sum_over(&z, m, |i| i4.at2(j, i).mul(w2.at2(i, l))))
    })
}

/// The seven residual tensors under the given readings.
pub fn residual_tensors<F: JetScalar>(a: &Analysis<F>, r: &Readings) -> Vec<Tensor<F>> {
    let m = a.dim();
    let w3 = a.w3(r.cube).clone();
    let i4 = i4_of(a, r);
    let cov = compute_covariant(a, r.cube, r.hm2);
    let c1 = a.i2().clone();
    let c2 = condition2(a, &i4, false);
    let c3 = Tensor::tensor3(m, |ix| i4.at2(ix[0], ix[1]).partial(q(ix[2])));
    let c4 = cov.d1w2.clone();
    let c5 = trace_free_ij(&condition5_body(a, &w3));
    let c6 = condition6(a, &w3);
    let c7 = condition7(a, &w3, &i4, cov.d2w3(r.d2w3));
    vec![c1, c2, c3, c4, c5, c6, c7]
}

/// `det I4` by permutation expansion.
pub fn determinant<F: JetScalar>(mat: &Tensor<F>) -> F {
    assert_eq!(mat.shape(), Shape::Matrix);
    let m = mat.dim();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut total = mat.at2(0, 0).zero_like();
    permutations(&mut perm, 0, &mut |perm, sign| {
        let mut term = mat.at2(0, perm[0]).clone();
        for (i, &pi) in perm.iter().enumerate().skip(1) {
            if term.is_zero() {
                return;
            }
            term = term.mul(mat.at2(i, pi));
        }
        total = if sign { total.add(&term) } else { total.sub(&term) };
    });
    total
}

fn permutations(perm: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize], bool)) {
    fn go(perm: &mut Vec<usize>, start: usize, even: bool, visit: &mut impl FnMut(&[usize], bool)) {
        if start == perm.len() {
            visit(perm, even);
            return;
        }
        for i in start..perm.len() {
            perm.swap(start, i);
            go(perm, start + 1, if i == start { even } else { !even }, visit);
            perm.swap(start, i);
        }
    }
    go(perm, start, true, visit)
}

/// Nonzero exact value of the first non-vanishing entry at a random point.
pub fn find_witness<F: ExactEval>(t: &Tensor<F>, seed: u64) -> Option<Witness> {
    let (index, entry) = t.first_nonzero()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..WITNESS_TRIES {
        let pt = SamplePoint::random(t.dim(), &mut rng);
        if let Ok(v) = entry.eval_at(&pt) {
            if !v.is_zero() {
                return Some(Witness { index: index.iter().map(|i| i + 1).collect(), point: pt, value: v.to_string() });
            }
        }
    }
    None
}

fn residual<F: ExactEval>(id: ConditionId, t: Tensor<F>, seed: u64) -> ConditionResidual<F> {
    let passed = t.is_zero();
    let witness = if passed { None } else { find_witness(&t, seed) };
    ConditionResidual { id, residual: t, passed, witness, vanishing_points: vec![] }
}

pub fn condition_residuals(sys: &OdeSystem) -> Vec<ConditionResidual> {
    let a = analysis(sys);
    let r = Readings::default();
    residual_tensors(&*a, &r)
        .into_iter()
        .zip(ConditionId::NUMBERED)
        .map(|(t, id)| residual(id, t, 0))
        .collect()
}

pub fn i4_rank_assessment(sys: &OdeSystem) -> ConditionResidual {
    let r = Readings::default();
    rank_assessment(&*analysis(sys), &r, 0)
}

pub fn rank_assessment<F: ExactEval>(a: &Analysis<F>, r: &Readings, seed: u64) -> ConditionResidual<F> {
    let det = determinant(&i4_of(a, r));
    let passed = !det.is_zero();
    let mut vanishing = Vec::new();
    if passed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut sampled = 0;
        let mut tries = 0;
        while sampled < RANK_SAMPLES && tries < RANK_SAMPLES * WITNESS_TRIES {
            tries += 1;
            let pt = SamplePoint::random(a.dim(), &mut rng);
            match det.eval_at(&pt) {
                Ok(v) => {
                    sampled += 1;
                    if v.is_zero() {
                        vanishing.push(pt);
                    }
                }
                Err(_) => continue,
            }
        }
    }
    ConditionResidual {
        id: ConditionId::Rank,
        residual: Tensor::scalar(det, a.dim()),
        passed,
        witness: None,
        vanishing_points: vanishing,
    }
}

/// `D_{-2} I4` with layout `(j, k; l)`.
pub fn d2_i4<F: JetScalar>(a: &Analysis<F>, i4: &Tensor<F>) -> Tensor<F> {
    let m = a.dim();
    let z = a.zero();
    let cc = a.connection(Hm2Reading::Corrected);
    Tensor::tensor3(m, |ix| {
        let (j, k, l) = (ix[0], ix[1], ix[2]);
        let deriv = i4
            .at2(j, k)
            .partial(p(l))
            .sub(&sum_over(&z, m, |s| i4.at2(j, k).partial(q(s)).mul(cc.b.at2(s, l))));
        let action =
            sum_over(&z, m, |s| cc.gm2.at3(s, j, l).mul(i4.at2(s, k)).add(&cc.gm2.at3(s, k, l).mul(i4.at2(j, s))));
        deriv.sub(&action)
    })
}

/// `D_{-3} I4` with layout `(j, k; l)`.
pub fn d3_i4<F: JetScalar>(a: &Analysis<F>, i4: &Tensor<F>) -> Tensor<F> {
    let m = a.dim();
    let z = a.zero();
    let cc = a.connection(Hm2Reading::Corrected);
    // Frame vector: d/dy_l - A^s_l d/dp_s - (C^s_l - B^s_t A^t_l) d/dq_s.
    let qcoef: Vec<Vec<F>> = (0..m)
        .map(|l| {
            (0..m)
                .map(|s| cc.c.at2(s, l).sub(&sum_over(&z, m, |t| cc.b.at2(s, t).mul(cc.a.at2(t, l)))))
                .collect()
        })
        .collect();
    let geff: Vec<Tensor<F>> = (0..m)
        .map(|l| {
            Tensor::matrix(m, |ix| {
                let (i, j) = (ix[0], ix[1]);
                cc.gm3.at3(i, j, l).sub(&sum_over(&z, m, |t| cc.gm2.at3(i, j, t).mul(cc.a.at2(t, l))))
            })
        })
        .collect();
    Tensor::tensor3(m, |ix| {
        let (j, k, l) = (ix[0], ix[1], ix[2]);
        let e = i4.at2(j, k);
        let deriv = e
            .partial(VarId::Y(l + 1))
            .sub(&sum_over(&z, m, |s| cc.a.at2(s, l).mul(&e.partial(p(s)))))
            .sub(&sum_over(&z, m, |s| qcoef[l][s].mul(&e.partial(q(s)))));
        let g = &geff[l];
        let action = sum_over(&z, m, |s| g.at2(s, j).mul(i4.at2(s, k)).add(&g.at2(s, k).mul(i4.at2(j, s))));
        deriv.sub(&action)
    })
}

/// Conditions 4, 5 and 6 rebuilt from the covariant derivatives.
pub fn covariant_condition_forms<F: JetScalar>(a: &Analysis<F>, cov: &CovariantDerivs<F>) -> [Tensor<F>; 3] {
    let m = a.dim();
    let z = a.zero();
    let c4 = cov.d1w2.clone();
    let body = Tensor::tensor3(m, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        cov.d1w3.at3(i, j, k).sub(&cov.d1w3.at3(i, k, j).scale_int(2, 1)).add(cov.d2w2.at3(i, k, j))
    });
    let c5 = trace_free_ij(&body);
    let inner: Vec<F> = (0..m)
        .map(|k| {
            sum_over(&z, m, |i| {
                cov.d1w3.at3(i, i, k).sub(&cov.d1w3.at3(i, k, i).scale_int(2, 1)).add(cov.d2w2.at3(i, k, i))
            })
        })
        .collect();
    let c6 = Tensor::matrix(m, |ix| inner[ix[0]].partial(q(ix[1])));
    [c4, c5, c6]
}

fn tensors_equal<F: JetScalar>(a: &Tensor<F>, b: &Tensor<F>) -> bool {
    a.sub(b).is_zero()
}

fn build_ledger<F: JetScalar>(a: &Analysis<F>, r: &Readings, residuals: &[Tensor<F>]) -> VariantLedger {
    let m = a.dim();
    let i4 = i4_of(a, r);
    let intro = a.i4(I4Variant::Intro, r.hm2);
    let conn = a.i4(I4Variant::Connection, r.hm2);
    let i4_symmetric = (0..m).all(|j| (j + 1..m).all(|k| i4.at2(j, k).sub(i4.at2(k, j)).is_zero()));
    let cov = compute_covariant(a, r.cube, r.hm2);
    let mut reading_outcomes = Vec::new();
    for hm2 in [Hm2Reading::Corrected, Hm2Reading::Literal] {
        for d2w3 in [D2W3Variant::A, D2W3Variant::B] {
            let alt = Readings { hm2, d2w3, ..*r };
            let failing = if alt == *r {
                failing_ids(residuals)
            } else {
                failing_ids(&residual_tensors(a, &alt))
            };
            reading_outcomes.push(ReadingOutcome { d2w3, hm2, annihilates: failing.is_empty(), failing });
        }
    }
    let forms = covariant_condition_forms(a, &cov);
    let covariant_forms_agree = [ConditionId::C4, ConditionId::C5, ConditionId::C6]
        .into_iter()
        .zip(forms.iter().zip(&residuals[3..6]))
        .map(|(id, (f, res))| (id, tensors_equal(f, res)))
        .collect();
    let bootstrap = residuals[..4]
        .iter()
        .all(|t| t.is_zero())
        .then(|| (d2_i4(a, &i4).is_zero(), d3_i4(a, &i4).is_zero()));
    VariantLedger {
        readings: *r,
        i2_normalization: format!("1/(m+1) with m = {m}"),
        i4_intro_equals_connection: tensors_equal(intro, conn),
        i4_symmetric,
        hm2_readings_agree: tensors_equal(a.hm2(Hm2Reading::Corrected), a.hm2(Hm2Reading::Literal)),
        i4_literal_hm2_equals_corrected: tensors_equal(
            a.i4(I4Variant::Connection, Hm2Reading::Literal),
            a.i4(I4Variant::Connection, Hm2Reading::Corrected),
        ),
        condition2_matches_covariant_form: tensors_equal(&residuals[1], &condition2_covariant(a, &i4)),
        condition2_literal_indices_vanish: condition2(a, &i4, true).is_zero(),
        w3_cube_conventions_agree: tensors_equal(a.w3(CubeConvention::Matrix), a.w3(CubeConvention::Entrywise)),
        d2w3_variants_agree: tensors_equal(&cov.d2w3_a, &cov.d2w3_b),
        reading_outcomes,
        covariant_forms_agree,
        bootstrap,
    }
}

/// Full check on any scalar representation.
pub fn check_analysis<F: ExactEval>(a: &Analysis<F>, opts: &CheckOptions) -> Verdict<F> {
    let r = &opts.readings;
    let tensors = residual_tensors(a, r);
    let ledger = opts.ledger.then(|| build_ledger(a, r, &tensors));
    let mut conditions: Vec<ConditionResidual<F>> = tensors
        .into_iter()
        .zip(ConditionId::NUMBERED)
        .enumerate()
        .map(|(n, (t, id))| residual(id, t, opts.seed.wrapping_add(n as u64)))
        .collect();
    conditions.push(rank_assessment(a, r, opts.seed));
    let conformal = conditions.iter().all(|c| c.passed);
    Verdict { conformal, conditions, ledger }
}

pub fn check_conformal(sys: &OdeSystem) -> Verdict {
    check_conformal_with(sys, &CheckOptions::default())
}

pub fn check_conformal_with(sys: &OdeSystem, opts: &CheckOptions) -> Verdict {
    check_analysis(&*analysis(sys), opts)
}

/// Randomized check without canonical forms: every formula is evaluated
/// over [`Probe`] scalars, so a pass means "probably conformal". Witnesses
/// are still exact.
pub fn check_numeric(sys: &OdeSystem, opts: &CheckOptions) -> Verdict<Probe> {
    let m = sys.dim();
    let ctx = ProbeContext::new(m, opts.seed);
    let coords = VarId::all(m).into_iter().map(|v| Probe::var(&ctx, v)).collect();
    let f = sys.rhs().iter().map(|e| Probe::from_expr(&ctx, e)).collect();
    check_analysis(&Analysis::new(Jet::new(m, coords, f)), opts)
}

/// Exact value of a witness entry, recomputed from scratch for auditing.
pub fn witness_value(t: &Tensor<RationalForm>, w: &Witness) -> Option<BigRational> {
    let idx: Vec<usize> = w.index.iter().map(|i| i - 1).collect();
    t.get(&idx).eval(w.point.values()).ok()
}
