//! Lazily computed derivative tables and invariants of one system.
//!
//! Every quantity is computed at most once per `Analysis`; exact analyses are
//! shared through a process-wide cache keyed by the canonical right-hand
//! sides.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::algebra::JetScalar;
use crate::connection::{self, ConnectionCoeffs};
use crate::expr::{RationalForm, VarId};
use crate::invariants;
use crate::jet::{Jet, OdeSystem};
use crate::tensor::Tensor;

/// Reading of the trailing term of `H^{-2}_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hm2Reading {
    /// `sum_k H^{-1}_k df^k/dq^j`
    Corrected,
    /// `sum_k H^{-1}_k df^k/dq^k`, added to every component
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum I4Variant {
    Intro,
    Connection,
}

/// Scalar factor multiplying `W2` in `D_{-2} W3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum D2W3Variant {
    /// `2 (H^{-1}_k - H^{-2}_l B^l_k)`
    A,
    /// `2 (H^{-2}_k - H^{-1}_l B^l_k)`
    B,
}

/// How `(df/dq)^3` in `W3` is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeConvention {
    Matrix,
    Entrywise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Readings {
    pub hm2: Hm2Reading,
    pub i4: I4Variant,
    pub d2w3: D2W3Variant,
    pub cube: CubeConvention,
}

impl Default for Readings {
    fn default() -> Self {
        Readings {
            hm2: Hm2Reading::Corrected,
            i4: I4Variant::Connection,
            d2w3: D2W3Variant::B,
            cube: CubeConvention::Matrix,
        }
    }
}

fn hm2_slot(r: Hm2Reading) -> usize {
    match r {
        Hm2Reading::Corrected => 0,
        Hm2Reading::Literal => 1,
    }
}

pub struct Analysis<F> {
    jet: Jet<F>,
    fq: OnceLock<Tensor<F>>,
    fp: OnceLock<Tensor<F>>,
    fy: OnceLock<Tensor<F>>,
    fqq: OnceLock<Tensor<F>>,
    dfq: OnceLock<Tensor<F>>,
    fq2: OnceLock<Tensor<F>>,
    q_trace: OnceLock<Tensor<F>>,
    hm1: OnceLock<Tensor<F>>,
    hx: OnceLock<Tensor<F>>,
    w2: OnceLock<Tensor<F>>,
    w3: [OnceLock<Tensor<F>>; 2],
    i2: OnceLock<Tensor<F>>,
    hm2: [OnceLock<Tensor<F>>; 2],
    i4_intro: OnceLock<Tensor<F>>,
    i4_conn: [OnceLock<Tensor<F>>; 2],
    connection: [OnceLock<ConnectionCoeffs<F>>; 2],
}

impl<F: JetScalar> Analysis<F> {
    pub fn new(jet: Jet<F>) -> Self {
        Analysis {
            jet,
            fq: OnceLock::new(),
            fp: OnceLock::new(),
            fy: OnceLock::new(),
            fqq: OnceLock::new(),
            dfq: OnceLock::new(),
            fq2: OnceLock::new(),
            q_trace: OnceLock::new(),
            hm1: OnceLock::new(),
            hx: OnceLock::new(),
            w2: OnceLock::new(),
            w3: Default::default(),
            i2: OnceLock::new(),
            hm2: Default::default(),
            i4_intro: OnceLock::new(),
            i4_conn: Default::default(),
            connection: Default::default(),
        }
    }

    pub fn jet(&self) -> &Jet<F> {
        &self.jet
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    pub fn zero(&self) -> F {
        self.jet.zero()
    }

    pub fn total(&self, e: &F) -> F {
        self.jet.total(e)
    }

    fn jacobian(&self, kind: fn(usize) -> VarId) -> Tensor<F> {
        Tensor::matrix(self.dim(), |ix| self.jet.f(ix[0]).partial(kind(ix[1] + 1)))
    }

    /// `df^i/dq^j`
    pub fn fq(&self) -> &Tensor<F> {
        self.fq.get_or_init(|| self.jacobian(VarId::Q))
    }

    /// `df^i/dp^j`
    pub fn fp(&self) -> &Tensor<F> {
        self.fp.get_or_init(|| self.jacobian(VarId::P))
    }

    /// `df^i/dy^j`
    pub fn fy(&self) -> &Tensor<F> {
        self.fy.get_or_init(|| self.jacobian(VarId::Y))
    }

    /// `d^2 f^i / dq^j dq^k`
    pub fn fqq(&self) -> &Tensor<F> {
        self.fqq.get_or_init(|| {
            let fq = self.fq();
            Tensor::tensor3(self.dim(), |ix| fq.at2(ix[0], ix[1]).partial(VarId::Q(ix[2] + 1)))
        })
    }

    /// `d/dx df^i/dq^j`
    pub fn dfq(&self) -> &Tensor<F> {
        self.dfq.get_or_init(|| self.fq().total(&self.jet))
    }

    /// `(df/dq)^2` as a matrix product.
    pub fn fq2(&self) -> &Tensor<F> {
        self.fq2.get_or_init(|| self.fq().matmul(self.fq()))
    }

    /// `t_j = sum_i d^2 f^i / dq^j dq^i`
    pub fn q_trace(&self) -> &Tensor<F> {
        self.q_trace.get_or_init(|| {
            let fqq = self.fqq();
            let m = self.dim();
            Tensor::vector(m, |ix| (1..m).fold(fqq.at3(0, 0, ix[0]).clone(), |acc, i| acc.add(fqq.at3(i, i, ix[0]))))
        })
    }

    pub fn hm1(&self) -> &Tensor<F> {
        self.hm1.get_or_init(|| invariants::compute_hm1(self))
    }

    /// `H^x` as a scalar tensor.
    pub fn hx(&self) -> &Tensor<F> {
        self.hx.get_or_init(|| invariants::compute_hx(self))
    }

    pub fn w2(&self) -> &Tensor<F> {
        self.w2.get_or_init(|| invariants::compute_w2(self))
    }

    pub fn w3(&self, cube: CubeConvention) -> &Tensor<F> {
        let slot = match cube {
            CubeConvention::Matrix => 0,
            CubeConvention::Entrywise => 1,
        };
        self.w3[slot].get_or_init(|| invariants::compute_w3(self, cube))
    }

    pub fn i2(&self) -> &Tensor<F> {
        self.i2.get_or_init(|| invariants::compute_i2(self))
    }

    pub fn hm2(&self, reading: Hm2Reading) -> &Tensor<F> {
        self.hm2[hm2_slot(reading)].get_or_init(|| connection::compute_hm2(self, reading))
    }

    pub fn i4(&self, variant: I4Variant, reading: Hm2Reading) -> &Tensor<F> {
        match variant {
            I4Variant::Intro => self.i4_intro.get_or_init(|| invariants::compute_i4_intro(self)),
            I4Variant::Connection => {
                self.i4_conn[hm2_slot(reading)].get_or_init(|| invariants::compute_i4_connection(self, reading))
            }
        }
    }

    pub fn connection(&self, reading: Hm2Reading) -> &ConnectionCoeffs<F> {
        self.connection[hm2_slot(reading)].get_or_init(|| connection::compute(self, reading))
    }
}

type Cache = Mutex<HashMap<Vec<RationalForm>, Arc<Analysis<RationalForm>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared exact analysis of `sys`.
pub fn analysis(sys: &OdeSystem) -> Arc<Analysis<RationalForm>> {
    let key = sys.rhs_forms().to_vec();
    if let Some(a) = cache().lock().unwrap().get(&key) {
        return a.clone();
    }
    let fresh = Arc::new(Analysis::new(sys.jet()));
    cache().lock().unwrap().entry(key).or_insert(fresh).clone()
}

/// Drops every cached analysis.
pub fn clear_cache() {
    cache().lock().unwrap().clear();
}
