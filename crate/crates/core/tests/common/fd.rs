//! Invariants recomputed from their printed formulas, with every derivative
//! replaced by a central difference evaluated in exact arithmetic (so the
//! only error is truncation). Uses nothing from the library beyond
//! evaluating the raw right-hand side trees.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use cgode::expr::SamplePoint;
use cgode::OdeSystem;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Func = dyn Fn(&[BigRational]) -> BigRational + Send + Sync;

#[derive(Clone)]
pub struct Fd(Arc<Func>);

fn step() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(1_000_000))
}

impl Fd {
    pub fn new(f: impl Fn(&[BigRational]) -> BigRational + Send + Sync + 'static) -> Fd {
        Fd(Arc::new(f))
    }

    pub fn constant(c: BigRational) -> Fd {
        Fd::new(move |_| c.clone())
    }

    pub fn zero() -> Fd {
        Fd::constant(BigRational::zero())
    }

    pub fn coord(slot: usize) -> Fd {
        Fd::new(move |pt| pt[slot].clone())
    }

    pub fn eval(&self, pt: &[BigRational]) -> BigRational {
        (self.0)(pt)
    }

    pub fn add(&self, o: &Fd) -> Fd {
        let (a, b) = (self.clone(), o.clone());
        Fd::new(move |pt| a.eval(pt) + b.eval(pt))
    }

    pub fn sub(&self, o: &Fd) -> Fd {
        let (a, b) = (self.clone(), o.clone());
        Fd::new(move |pt| a.eval(pt) - b.eval(pt))
    }

    pub fn mul(&self, o: &Fd) -> Fd {
        let (a, b) = (self.clone(), o.clone());
        Fd::new(move |pt| a.eval(pt) * b.eval(pt))
    }

    pub fn scale(&self, n: i64, d: i64) -> Fd {
        let a = self.clone();
        let c = BigRational::new(BigInt::from(n), BigInt::from(d));
        Fd::new(move |pt| a.eval(pt) * &c)
    }

    /// Central difference in coordinate `slot`.
    pub fn d(&self, slot: usize) -> Fd {
        let g = self.clone();
        Fd::new(move |pt| {
            let h = step();
            let mut up = pt.to_vec();
            up[slot] += &h;
            let mut down = pt.to_vec();
            down[slot] -= &h;
            (g.eval(&up) - g.eval(&down)) / (h * BigRational::from_integer(2.into()))
        })
    }
}

pub fn sum(items: impl IntoIterator<Item = Fd>) -> Fd {
    items.into_iter().fold(Fd::zero(), |a, b| a.add(&b))
}

pub type Mat = Vec<Vec<Fd>>;

pub struct FdJet {
    pub m: usize,
    pub f: Vec<Fd>,
}

impl FdJet {
    pub fn new(sys: &OdeSystem) -> FdJet {
        let m = sys.dim();
        let f = (0..m)
            .map(|i| {
                let e = sys.rhs()[i].clone();
                // nested differences revisit the same shifted points many times
                let memo: Mutex<HashMap<Vec<BigRational>, BigRational>> = Mutex::default();
                Fd::new(move |pt| {
                    if let Some(v) = memo.lock().unwrap().get(pt) {
                        return v.clone();
                    }
                    let v = e.eval_exact(&SamplePoint::new(m, pt.to_vec())).expect("pole in finite difference");
                    memo.lock().unwrap().insert(pt.to_vec(), v.clone());
                    v
                })
            })
            .collect();
        FdJet { m, f }
    }

    pub fn y(&self, i: usize) -> usize {
        1 + i
    }

    pub fn p(&self, i: usize) -> usize {
        1 + self.m + i
    }

    pub fn q(&self, i: usize) -> usize {
        1 + 2 * self.m + i
    }

    /// `d/dx = dx + p dy + q dp + f dq`
    pub fn total(&self, g: &Fd) -> Fd {
        let mut out = g.d(0);
        for i in 0..self.m {
            out = out
                .add(&Fd::coord(self.p(i)).mul(&g.d(self.y(i))))
                .add(&Fd::coord(self.q(i)).mul(&g.d(self.p(i))))
                .add(&self.f[i].mul(&g.d(self.q(i))));
        }
        out
    }

    fn jac(&self, slot: impl Fn(usize) -> usize) -> Mat {
        (0..self.m).map(|i| (0..self.m).map(|j| self.f[i].d(slot(j))).collect()).collect()
    }

    fn matmul(&self, a: &Mat, b: &Mat) -> Mat {
        let m = self.m;
        (0..m).map(|i| (0..m).map(|j| sum((0..m).map(|k| a[i][k].mul(&b[k][j])))).collect()).collect()
    }

    fn trace_free(&self, a: &Mat) -> Mat {
        let m = self.m;
        let tr = sum((0..m).map(|i| a[i][i].clone())).scale(1, m as i64);
        (0..m).map(|i| (0..m).map(|j| if i == j { a[i][j].sub(&tr) } else { a[i][j].clone() }).collect()).collect()
    }
}

pub struct FdInvariants {
    pub hx: Fd,
    pub hm1: Vec<Fd>,
    pub i2: Vec<Vec<Vec<Fd>>>,
    pub w2: Mat,
    pub w3: Mat,
    pub i4_intro: Mat,
    pub i4_connection: Mat,
}

pub fn invariants(sys: &OdeSystem) -> FdInvariants {
    let jet = FdJet::new(sys);
    let m = jet.m;
    let mi = m as i64;
    let fq = jet.jac(|j| jet.q(j));
    let fp = jet.jac(|j| jet.p(j));
    let fy = jet.jac(|j| jet.y(j));
    let dfq: Mat = fq.iter().map(|r| r.iter().map(|e| jet.total(e)).collect()).collect();
    let fq2 = jet.matmul(&fq, &fq);

    let hess = |i: usize, j: usize, k: usize| jet.f[i].d(jet.q(j)).d(jet.q(k));
    let hm1: Vec<Fd> = (0..m).map(|j| sum((0..m).map(|i| hess(i, i, j))).scale(1, 6 * (mi + 1))).collect();
    let hx = sum((0..m).map(|i| fp[i][i].clone()))
        .sub(&jet.total(&sum((0..m).map(|i| fq[i][i].clone()))))
        .add(&sum((0..m).map(|i| fq2[i][i].clone())).scale(1, 3))
        .scale(-1, 4 * mi);

    let tr: Vec<Fd> = (0..m).map(|j| sum((0..m).map(|i| hess(i, i, j)))).collect();
    let i2 = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..m)
                        .map(|k| {
                            let mut e = hess(i, j, k);
                            if i == k {
                                e = e.sub(&tr[j].scale(1, mi + 1));
                            }
                            if i == j {
                                e = e.sub(&tr[k].scale(1, mi + 1));
                            }
                            e
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let w2_body: Mat =
        (0..m).map(|i| (0..m).map(|j| fp[i][j].sub(&dfq[i][j]).add(&fq2[i][j].scale(1, 3))).collect()).collect();
    let w2 = jet.trace_free(&w2_body);

    let fq_fp = jet.matmul(&fq, &fp);
    let fq3 = jet.matmul(&fq2, &fq);
    let fq_dfq = jet.matmul(&fq, &dfq);
    let dfq_fq = jet.matmul(&dfq, &fq);
    let dhx = jet.total(&hx);
    let w3 = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let e = fy[i][j]
                        .add(&fq_fp[i][j].scale(1, 3))
                        .sub(&jet.total(&fp[i][j]))
                        .add(&jet.total(&dfq[i][j]).scale(2, 3))
                        .add(&fq3[i][j].scale(2, 27))
                        .sub(&fq_dfq[i][j].scale(4, 9))
                        .sub(&dfq_fq[i][j].scale(2, 9));
                    if i == j {
                        e.sub(&dhx.scale(2, 1))
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();

    let dhm1: Vec<Fd> = hm1.iter().map(|h| jet.total(h)).collect();
    let h1fq: Vec<Fd> = (0..m).map(|j| sum((0..m).map(|l| hm1[l].mul(&fq[l][j])))).collect();
    let common = |j: usize, k: usize| hm1[k].d(jet.p(j)).scale(-1, 1).add(&hm1[j].mul(&hm1[k]).scale(2, 1));
    let i4_intro = (0..m)
        .map(|j| {
            (0..m)
                .map(|k| {
                    common(j, k)
                        .add(&hx.d(jet.q(j)).d(jet.q(k)))
                        .sub(&dhm1[j].d(jet.q(k)))
                        .sub(&h1fq[j].d(jet.q(k)))
                })
                .collect()
        })
        .collect();
    let hm2: Vec<Fd> = (0..m).map(|j| hx.d(jet.q(j)).sub(&dhm1[j]).sub(&h1fq[j])).collect();
    let i4_connection =
        (0..m).map(|j| (0..m).map(|k| common(j, k).add(&hm2[j].d(jet.q(k)))).collect()).collect();

    FdInvariants { hx, hm1, i2, w2, w3, i4_intro, i4_connection }
}
