//! Shared generators for the property suites: seeded random systems,
//! commuting contraction tuples, and exact dilation pairs.
#![allow(dead_code)]

use lsds::colligation::Colligation;
use lsds::dilation::SubspaceBasis;
use lsds::matrix::{C64, CMatrix};
use lsds::pencil::{random_conservative_pencil, random_unitary};
use lsds::transfer::CommutingTuple;
use lsds::tuple::{OperatorTuple, TorusPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_tuple(n: usize, rows: usize, cols: usize, rng: &mut impl Rng) -> OperatorTuple {
    OperatorTuple::new((0..n).map(|_| random_matrix(rows, cols, rng)).collect()).unwrap()
}

/// Random colligation whose stacked pencil has torus norm at most `target`.
pub fn random_dissipative(
    n: usize,
    dx: usize,
    din: usize,
    dout: usize,
    target: f64,
    rng: &mut impl Rng,
) -> Colligation {
    let g = random_tuple(n, dx + dout, dx + din, rng);
    let bound: f64 = g.mats().iter().map(|m| m.spectral_norm()).sum();
    let g = g.scale(C64::new(target / bound.max(1e-12), 0.0));
    Colligation::from_stacked(&g, dx).unwrap()
}

/// Commuting contraction tuples of three structural flavors, selected by seed.
pub fn random_commuting(n: usize, dh: usize, rng: &mut impl Rng) -> CommutingTuple {
    match rng.gen_range(0..3u8) {
        0 => {
            // jointly diagonal in a random unitary frame
            let u = random_unitary(dh, rng);
            let mats = (0..n)
                .map(|_| {
                    let d = CMatrix::from_fn(dh, dh, |i, j| {
                        if i == j {
                            C64::from_polar(rng.gen::<f64>(), rng.gen::<f64>() * TAU)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    });
                    u.matmul(&d).matmul(&u.adjoint())
                })
                .collect();
            CommutingTuple::with_tolerances(mats, 1e-10, 1e-8).unwrap()
        }
        1 => {
            // commuting order-2 nilpotent blocks
            let m = dh.max(2) / 2;
            let blocks: Vec<CMatrix> = (0..n)
                .map(|_| {
                    let x = random_matrix(m, m, rng);
                    let norm = x.spectral_norm();
                    x.scale(C64::new(rng.gen::<f64>() / norm.max(1e-12), 0.0))
                })
                .collect();
            let mats = blocks
                .iter()
                .map(|x| {
                    CMatrix::block2x2(
                        &CMatrix::zeros(m, m),
                        &CMatrix::zeros(m, m),
                        x,
                        &CMatrix::zeros(m, m),
                    )
                })
                .collect();
            CommutingTuple::new(mats).unwrap()
        }
        _ => {
            // powers of one contraction
            let base = random_matrix(dh, dh, rng);
            let norm = base.spectral_norm();
            let base = base.scale(C64::new(0.95 / norm.max(1e-12), 0.0));
            let mut mats = Vec::with_capacity(n);
            let mut power = base.clone();
            for _ in 0..n {
                mats.push(power.clone());
                power = power.matmul(&base);
            }
            CommutingTuple::with_tolerances(mats, 1e-10, 1e-8).unwrap()
        }
    }
}

pub fn random_torus_point(n: usize, rng: &mut impl Rng) -> TorusPoint {
    TorusPoint::from_phases(&(0..n).map(|_| rng.gen::<f64>() * TAU).collect::<Vec<_>>())
}

/// An exact dilation pair built from the invariant-subspace block form:
/// state D (+) X (+) D*, A-tilde block upper triangular, B-tilde supported on
/// D (+) X, C-tilde supported on X (+) D*. Conjugated by a random unitary so
/// the embedding is not axis-aligned.
pub struct DilationPair {
    pub tilde: Colligation,
    pub alpha: Colligation,
    pub embed: SubspaceBasis,
}

pub fn triangular_dilation_pair(
    n: usize,
    d_lower: usize,
    dx: usize,
    d_upper: usize,
    din: usize,
    dout: usize,
    rotate: bool,
    rng: &mut impl Rng,
) -> DilationPair {
    let alpha = random_dissipative(n, dx, din, dout, 0.9, rng);
    let total = d_lower + dx + d_upper;
    let scale = 0.3 / (total as f64);
    let mut a_mats = Vec::new();
    let mut b_mats = Vec::new();
    let mut c_mats = Vec::new();
    for k in 0..n {
        let r11 = random_matrix(d_lower, d_lower, rng).scale(C64::new(scale, 0.0));
        let r12 = random_matrix(d_lower, dx, rng).scale(C64::new(scale, 0.0));
        let r13 = random_matrix(d_lower, d_upper, rng).scale(C64::new(scale, 0.0));
        let r23 = random_matrix(dx, d_upper, rng).scale(C64::new(scale, 0.0));
        let r33 = random_matrix(d_upper, d_upper, rng).scale(C64::new(scale, 0.0));
        let row1 = CMatrix::hconcat(&CMatrix::hconcat(&r11, &r12), &r13);
        let row2 = CMatrix::hconcat(
            &CMatrix::hconcat(&CMatrix::zeros(dx, d_lower), alpha.a().mat(k)),
            &r23,
        );
        let row3 = CMatrix::hconcat(
            &CMatrix::zeros(d_upper, d_lower + dx),
            &r33,
        );
        a_mats.push(CMatrix::vconcat(&CMatrix::vconcat(&row1, &row2), &row3));
        let rb = random_matrix(d_lower, din, rng).scale(C64::new(scale, 0.0));
        b_mats.push(CMatrix::vconcat(
            &CMatrix::vconcat(&rb, alpha.b().mat(k)),
            &CMatrix::zeros(d_upper, din),
        ));
        let rc = random_matrix(dout, d_upper, rng).scale(C64::new(scale, 0.0));
        c_mats.push(CMatrix::hconcat(
            &CMatrix::hconcat(&CMatrix::zeros(dout, d_lower), alpha.c().mat(k)),
            &rc,
        ));
    }
    let mut tilde = Colligation::new(
        OperatorTuple::new(a_mats).unwrap(),
        OperatorTuple::new(b_mats).unwrap(),
        OperatorTuple::new(c_mats).unwrap(),
        alpha.d().clone(),
    )
    .unwrap();
    let mut embed_mat = CMatrix::from_fn(total, dx, |i, j| {
        if i == d_lower + j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    if rotate {
        let w = random_unitary(total, rng);
        tilde = conjugate_state(&tilde, &w);
        embed_mat = w.matmul(&embed_mat);
    }
    DilationPair { tilde, alpha, embed: SubspaceBasis::new(embed_mat).unwrap() }
}

/// Conservative alpha together with a conservative dilation: the direct sum
/// of alpha's stacked pencil with conservative pencils on the defect spaces,
/// state-rotated by a random unitary.
pub fn conservative_dilation_pair(
    n: usize,
    d_lower: usize,
    dx: usize,
    d_upper: usize,
    io: usize,
    rotate: bool,
    rng: &mut impl Rng,
) -> DilationPair {
    let g = random_conservative_pencil(n, dx + io, rng.gen());
    let alpha = Colligation::from_stacked(&g, dx).unwrap();
    let lower = random_conservative_pencil(n, d_lower, rng.gen());
    let upper = random_conservative_pencil(n, d_upper, rng.gen());
    let total = d_lower + dx + d_upper;
    let mut a_mats = Vec::new();
    let mut b_mats = Vec::new();
    let mut c_mats = Vec::new();
    for k in 0..n {
        let mut a = CMatrix::zeros(total, total);
        for i in 0..d_lower {
            for j in 0..d_lower {
                a[(i, j)] = lower.mat(k)[(i, j)];
            }
        }
        for i in 0..dx {
            for j in 0..dx {
                a[(d_lower + i, d_lower + j)] = alpha.a().mat(k)[(i, j)];
            }
        }
        for i in 0..d_upper {
            for j in 0..d_upper {
                a[(d_lower + dx + i, d_lower + dx + j)] = upper.mat(k)[(i, j)];
            }
        }
        a_mats.push(a);
        b_mats.push(CMatrix::vconcat(
            &CMatrix::vconcat(&CMatrix::zeros(d_lower, io), alpha.b().mat(k)),
            &CMatrix::zeros(d_upper, io),
        ));
        c_mats.push(CMatrix::hconcat(
            &CMatrix::hconcat(&CMatrix::zeros(io, d_lower), alpha.c().mat(k)),
            &CMatrix::zeros(io, d_upper),
        ));
    }
    let mut tilde = Colligation::new(
        OperatorTuple::new(a_mats).unwrap(),
        OperatorTuple::new(b_mats).unwrap(),
        OperatorTuple::new(c_mats).unwrap(),
        alpha.d().clone(),
    )
    .unwrap();
    let mut embed_mat = CMatrix::from_fn(total, dx, |i, j| {
        if i == d_lower + j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    if rotate {
        let w = random_unitary(total, rng);
        tilde = conjugate_state(&tilde, &w);
        embed_mat = w.matmul(&embed_mat);
    }
    DilationPair { tilde, alpha, embed: SubspaceBasis::new(embed_mat).unwrap() }
}

/// State-space change of basis: A -> W A W^H, B -> W B, C -> C W^H.
pub fn conjugate_state(alpha: &Colligation, w: &CMatrix) -> Colligation {
    let wh = w.adjoint();
    Colligation::new(
        alpha.a().map(|m| w.matmul(m).matmul(&wh)),
        alpha.b().map(|m| w.matmul(m)),
        alpha.c().map(|m| m.matmul(&wh)),
        alpha.d().clone(),
    )
    .unwrap()
}

/// Perturbs every state-coupled block of the big system by `eps`-scaled noise.
pub fn perturb_tilde(pair: &DilationPair, eps: f64, rng: &mut impl Rng) -> Colligation {
    let bump = |t: &OperatorTuple, rng: &mut ChaCha8Rng| -> OperatorTuple {
        OperatorTuple::new(
            t.mats()
                .iter()
                .map(|m| m.add(&random_matrix(m.rows(), m.cols(), rng).scale(C64::new(eps, 0.0))))
                .collect(),
        )
        .unwrap()
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    Colligation::new(
        bump(pair.tilde.a(), &mut local),
        bump(pair.tilde.b(), &mut local),
        bump(pair.tilde.c(), &mut local),
        pair.tilde.d().clone(),
    )
    .unwrap()
}

pub fn random_polydisc_point(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..n)
        .map(|_| C64::from_polar(rng.gen::<f64>(), rng.gen::<f64>() * TAU))
        .collect()
}
