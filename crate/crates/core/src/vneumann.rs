//! Violation machinery for the multivariable von Neumann inequality with
//! linear matrix pencils: commuting contraction generators, a seeded ratio
//! search, witness validation, and assembly of dissipative systems whose
//! pencils fall outside the generalized Schur class.
//!
//! Two generator families are searched. The bordered family (paired vector
//! data on C (+) C^m (+) C) is the classical order-3 nilpotent construction;
//! for a *linear* pencil its evaluation norm splits level by level, so this
//! family alone never exceeds the torus supremum. The block family
//! T_k = [[0, 0], [X_k, 0]] commutes for arbitrary contraction blocks X_k and
//! realizes genuine violations; the Pauli triple gives the exactly checkable
//! instance ||sum sigma_k (x) sigma_k|| = 3 > sqrt(6) = torus maximum.

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};
use crate::pencil::{phase_ascent_bounded, torus_norm_max, Verdict};
use crate::transfer::CommutingTuple;
use crate::tuple::OperatorTuple;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_ITERS: usize = 2000;
/// Margin above 1 for a witness to count as a violation.
pub const WITNESS_MARGIN: f64 = 1e-9;
/// Radius at which witnesses are reported (just inside the open ball).
pub const WITNESS_RADIUS: f64 = 1.0 - 1e-6;

const VALIDATION_SEED: u64 = 0;
const VALIDATION_RESTARTS: usize = 8;

fn validation_grid(n: usize) -> usize {
    match n {
        0 | 1 => 512,
        2 => 96,
        3 => 24,
        4 => 12,
        _ => 6,
    }
}

/// A claimed violation instance: coefficients, tuple, and the compared norms.
#[derive(Clone, Debug)]
pub struct ViolationWitness {
    pub m: OperatorTuple,
    pub t: CommutingTuple,
    pub r: f64,
    /// ||L_M(rT)||
    pub lhs: f64,
    /// best-found torus maximum of ||L_M(z)||
    pub rhs: f64,
    pub ratio: f64,
    pub seed: u64,
}

impl ViolationWitness {
    pub fn is_violation(&self) -> bool {
        self.ratio > 1.0 + WITNESS_MARGIN
    }
}

/// Outcome of an independent revalidation.
#[derive(Clone, Debug)]
pub struct WitnessValidation {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// |recomputed ratio - stored ratio|
    pub ratio_gap: f64,
    pub is_violation: bool,
}

/// The order-3 nilpotent tuple from paired vector families on C (+) C^m (+) C:
/// T_k (a, v, b) = (0, a x_k, <v, y_k>). Requires the pairing symmetry
/// <x_l, y_k> = <x_k, y_l> and unit-ball vectors.
pub fn varopoulos_tuple(x: &[Vec<C64>], y: &[Vec<C64>]) -> Result<CommutingTuple> {
    let n = x.len();
    if n == 0 || y.len() != n {
        return Err(Error::ShapeMismatch("need matching nonempty x and y families".into()));
    }
    let m = x[0].len();
    if x.iter().any(|v| v.len() != m) || y.iter().any(|v| v.len() != m) {
        return Err(Error::ShapeMismatch("all vectors must share one length".into()));
    }
    for (label, family) in [("x", x), ("y", y)] {
        for (k, v) in family.iter().enumerate() {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1.0 + 1e-12 {
                return Err(Error::PreconditionFailed(format!(
                    "{label}_{k} has norm {norm}, outside the unit ball"
                )));
            }
        }
    }
    let pair = |u: &[C64], w: &[C64]| -> C64 {
        u.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
    };
    let mut sym_defect = 0.0f64;
    for k in 0..n {
        for l in 0..n {
            let gap = (pair(&x[l], &y[k]) - pair(&x[k], &y[l])).norm();
            sym_defect = sym_defect.max(gap);
        }
    }
    if sym_defect > 1e-12 {
        return Err(Error::PreconditionFailed(format!(
            "pairing symmetry violated by {sym_defect:.3e}"
        )));
    }
    let dim = m + 2;
    let mats: Vec<CMatrix> = (0..n)
        .map(|k| {
            CMatrix::from_fn(dim, dim, |i, j| {
                if (1..=m).contains(&i) && j == 0 {
                    x[k][i - 1]
                } else if i == m + 1 && (1..=m).contains(&j) {
                    y[k][j - 1].conj()
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    CommutingTuple::with_tolerances(
        mats,
        sym_defect.max(1e-14),
        CommutingTuple::DEFAULT_CONTRACTION_TOL,
    )
}

/// Order-2 nilpotent block tuple T_k = [[0, 0], [X_k, 0]]: commutes for
/// arbitrary blocks, contractive iff each block is.
pub fn nilpotent_block_tuple(blocks: &[CMatrix]) -> Result<CommutingTuple> {
    if blocks.is_empty() {
        return Err(Error::ShapeMismatch("need at least one block".into()));
    }
    let m = blocks[0].rows();
    if blocks.iter().any(|b| b.rows() != m || b.cols() != m) {
        return Err(Error::ShapeMismatch("blocks must be square of one size".into()));
    }
    let mats: Vec<CMatrix> = blocks
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
    CommutingTuple::new(mats)
}

/// The Pauli instance: M = (sigma_x, sigma_y, sigma_z) with the block tuple
/// built from the same matrices. ||L_M(T)|| = 3 while the torus maximum is
/// sqrt(6), a ratio of sqrt(3/2).
pub fn pauli_coefficients() -> OperatorTuple {
    let sx = CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let sy = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    });
    let sz = CMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]);
    OperatorTuple::new(vec![sx, sy, sz]).expect("fixed shapes")
}

pub fn pauli_tuple() -> CommutingTuple {
    nilpotent_block_tuple(pauli_coefficients().mats()).expect("unitary blocks are contractions")
}

/// Builds the fully validated Pauli witness at the reporting radius.
pub fn pauli_witness() -> ViolationWitness {
    let m = pauli_coefficients();
    let t = pauli_tuple();
    finalize_witness(m, t, 0)
}

/// Fresh Kronecker assembly of sum_k M_k (x) r T_k with local index loops;
/// the independent evaluation path used by validation.
fn assemble_lhs(m: &OperatorTuple, t: &CommutingTuple, r: f64) -> CMatrix {
    let dm = m.rows();
    let dt = t.dim();
    let mut big = CMatrix::zeros(dm * dt, m.cols() * dt);
    for k in 0..m.n() {
        let mk = m.mat(k);
        let tk = t.mat(k);
        for i1 in 0..mk.rows() {
            for j1 in 0..mk.cols() {
                let a = mk[(i1, j1)] * r;
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for i2 in 0..dt {
                    for j2 in 0..dt {
                        big[(i1 * dt + i2, j1 * dt + j2)] += a * tk[(i2, j2)];
                    }
                }
            }
        }
    }
    big
}

fn reference_rhs(m: &OperatorTuple) -> f64 {
    torus_norm_max(m, validation_grid(m.n()), VALIDATION_RESTARTS, VALIDATION_SEED)
        .expect("grid at least 2")
        .torus_max
}

fn finalize_witness(m: OperatorTuple, t: CommutingTuple, seed: u64) -> ViolationWitness {
    let rhs = reference_rhs(&m);
    let lhs = assemble_lhs(&m, &t, WITNESS_RADIUS).spectral_norm();
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    ViolationWitness { m, t, r: WITNESS_RADIUS, lhs, rhs, ratio, seed }
}

/// Recomputes a witness's numbers from scratch and compares with the stored
/// ratio.
pub fn validate_witness(w: &ViolationWitness) -> Result<WitnessValidation> {
    if w.m.n() != w.t.n() {
        return Err(Error::ShapeMismatch("coefficients and tuple disagree on N".into()));
    }
    if !(0.0 < w.r && w.r < 1.0) {
        return Err(Error::DomainViolation(format!("witness radius {} outside (0,1)", w.r)));
    }
    let lhs = assemble_lhs(&w.m, &w.t, w.r).spectral_norm();
    let rhs = reference_rhs(&w.m);
    if rhs <= 0.0 {
        return Err(Error::DomainViolation("degenerate witness: zero pencil".into()));
    }
    let ratio = lhs / rhs;
    Ok(WitnessValidation {
        lhs,
        rhs,
        ratio,
        ratio_gap: (ratio - w.ratio).abs(),
        is_violation: ratio > 1.0 + WITNESS_MARGIN,
    })
}

#[derive(Clone)]
enum FamilyState {
    Block { blocks: Vec<CMatrix> },
    Bordered { x: Vec<Vec<C64>> },
}

impl FamilyState {
    fn tuple(&self) -> CommutingTuple {
        match self {
            FamilyState::Block { blocks } => {
                nilpotent_block_tuple(blocks).expect("blocks clamped to contractions")
            }
            FamilyState::Bordered { x } => {
                let y: Vec<Vec<C64>> =
                    x.iter().map(|v| v.iter().map(|z| z.conj()).collect()).collect();
                varopoulos_tuple(x, &y).expect("conjugate pairing is symmetric")
            }
        }
    }

    /// Norm of L_M(T) computed on the reduced representation.
    fn lhs(&self, m: &OperatorTuple) -> f64 {
        match self {
            FamilyState::Block { blocks } => {
                let mut acc =
                    CMatrix::zeros(m.rows() * blocks[0].rows(), m.cols() * blocks[0].cols());
                for k in 0..m.n() {
                    acc = acc.add(&CMatrix::kron(m.mat(k), &blocks[k]).expect("small"));
                }
                acc.spectral_norm()
            }
            FamilyState::Bordered { x } => {
                // level maps: a -> v block column, v -> b block row
                let mcols: Vec<CMatrix> = x
                    .iter()
                    .map(|v| CMatrix::from_fn(v.len(), 1, |i, _| v[i]))
                    .collect();
                let mut up = CMatrix::zeros(m.rows() * x[0].len(), m.cols());
                let mut down = CMatrix::zeros(m.rows(), m.cols() * x[0].len());
                for k in 0..m.n() {
                    up = up.add(&CMatrix::kron(m.mat(k), &mcols[k]).expect("small"));
                    down = down.add(&CMatrix::kron(m.mat(k), &mcols[k].adjoint()).expect("small"));
                }
                up.spectral_norm().max(down.spectral_norm())
            }
        }
    }
}

struct SearchState {
    m: OperatorTuple,
    family: FamilyState,
    rhs: f64,
    rhs_phases: Vec<f64>,
}

impl SearchState {
    fn ratio(&self) -> f64 {
        let lhs = self.family.lhs(&self.m);
        if self.rhs > 0.0 {
            lhs / self.rhs
        } else {
            0.0
        }
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

fn clamp_contraction(m: &CMatrix) -> CMatrix {
    let norm = m.spectral_norm();
    if norm > 1.0 {
        m.scale(C64::new(1.0 / norm, 0.0))
    } else {
        m.clone()
    }
}

fn clamp_ball(v: &mut Vec<C64>) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 1.0 {
        for z in v.iter_mut() {
            *z /= C64::new(norm, 0.0);
        }
    }
}

fn refresh_rhs(state: &mut SearchState, sweeps: usize) {
    let (phases, value) = phase_ascent_bounded(&state.m, &state.rhs_phases, 0.4, sweeps);
    state.rhs_phases = phases;
    state.rhs = value;
}

fn coarse_rhs(m: &OperatorTuple, rng: &mut impl Rng) -> (Vec<f64>, f64) {
    let n = m.n();
    let mut best_phases = vec![0.0; n];
    let mut best = f64::NEG_INFINITY;
    let samples = 128usize;
    for _ in 0..samples {
        let phases: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
        let z: Vec<C64> = phases.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let v = crate::pencil::eval_pencil(m, &z).expect("arity").spectral_norm();
        if v > best {
            best = v;
            best_phases = phases;
        }
    }
    phase_ascent_bounded(m, &best_phases, 0.6, 4)
}

fn run_restart(
    n: usize,
    matrix_dim: usize,
    defect_dim: usize,
    seed: u64,
    restart: usize,
    iters: usize,
) -> ViolationWitness {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let pauli_start = restart == 0 && n == 3 && matrix_dim == 2 && defect_dim == 2;
    let mut m = if pauli_start {
        pauli_coefficients()
    } else {
        OperatorTuple::new(
            (0..n)
                .map(|_| {
                    CMatrix::from_fn(matrix_dim, matrix_dim, |_, _| {
                        C64::new(gaussian(&mut rng), gaussian(&mut rng))
                            * C64::new(1.0 / (matrix_dim as f64).sqrt(), 0.0)
                    })
                })
                .collect(),
        )
        .expect("fixed shapes")
    };
    let mut family = if pauli_start {
        FamilyState::Block { blocks: pauli_coefficients().mats().to_vec() }
    } else if restart % 2 == 0 {
        FamilyState::Block {
            blocks: (0..n)
                .map(|_| {
                    clamp_contraction(&CMatrix::from_fn(defect_dim, defect_dim, |_, _| {
                        C64::new(gaussian(&mut rng), gaussian(&mut rng))
                    }))
                })
                .collect(),
        }
    } else {
        FamilyState::Bordered {
            x: (0..n)
                .map(|_| {
                    let mut v: Vec<C64> = (0..defect_dim)
                        .map(|_| C64::new(gaussian(&mut rng), gaussian(&mut rng)))
                        .collect();
                    clamp_ball(&mut v);
                    v
                })
                .collect(),
        }
    };

    let (rhs_phases, rhs) = coarse_rhs(&m, &mut rng);
    let mut state = SearchState { m: m.clone(), family: family.clone(), rhs, rhs_phases };
    let mut best_ratio = state.ratio();
    let mut step = 0.3;
    for iter in 0..iters {
        let mutate_m = rng.gen::<f64>() < 0.3 && !pauli_start;
        let mut cand_m = state.m.clone();
        let mut cand_family = state.family.clone();
        if mutate_m {
            let k = rng.gen_range(0..n);
            let i = rng.gen_range(0..matrix_dim);
            let j = rng.gen_range(0..matrix_dim);
            let mut mats = cand_m.mats().to_vec();
            let mut mk = mats[k].clone();
            mk[(i, j)] += C64::new(gaussian(&mut rng), gaussian(&mut rng)) * step;
            mats[k] = mk;
            cand_m = OperatorTuple::new(mats).expect("shape kept");
        } else {
            match &mut cand_family {
                FamilyState::Block { blocks } => {
                    let k = rng.gen_range(0..n);
                    let i = rng.gen_range(0..defect_dim);
                    let j = rng.gen_range(0..defect_dim);
                    let mut b = blocks[k].clone();
                    b[(i, j)] += C64::new(gaussian(&mut rng), gaussian(&mut rng)) * step;
                    blocks[k] = clamp_contraction(&b);
                }
                FamilyState::Bordered { x } => {
                    let k = rng.gen_range(0..n);
                    let i = rng.gen_range(0..defect_dim);
                    x[k][i] += C64::new(gaussian(&mut rng), gaussian(&mut rng)) * step;
                    clamp_ball(&mut x[k]);
                }
            }
        }
        let mut cand = SearchState {
            m: cand_m,
            family: cand_family,
            rhs: state.rhs,
            rhs_phases: state.rhs_phases.clone(),
        };
        if mutate_m {
            refresh_rhs(&mut cand, 1);
        }
        if iter % 200 == 199 {
            refresh_rhs(&mut cand, 3);
        }
        let cand_ratio = cand.ratio();
        if cand_ratio > best_ratio {
            best_ratio = cand_ratio;
            state = cand;
            step = (step * 1.1).min(1.0);
        } else {
            step = (step * 0.98).max(1e-4);
        }
    }
    m = state.m;
    family = state.family;
    finalize_witness(m, family.tuple(), seed)
}

/// Seeded search for a von Neumann violation by a linear pencil evaluated on
/// commuting contractions. Returns the best witness found, violating or not;
/// deterministic given the seed.
pub fn violation_search(
    n: usize,
    matrix_dim: usize,
    defect_dim: usize,
    seed: u64,
    restarts: usize,
    iters: usize,
) -> Result<ViolationWitness> {
    if n < 1 || matrix_dim < 1 || defect_dim < 1 {
        return Err(Error::InvalidConfig("dimensions must be positive".into()));
    }
    let outcomes: Vec<(usize, ViolationWitness)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|restart| (restart, run_restart(n, matrix_dim, defect_dim, seed, restart, iters)))
        .collect();
    let best = outcomes
        .into_iter()
        .max_by(|a, b| {
            (a.1.ratio, std::cmp::Reverse(a.0))
                .partial_cmp(&(b.1.ratio, std::cmp::Reverse(b.0)))
                .unwrap()
        })
        .map(|(_, w)| w)
        .expect("at least one restart");
    Ok(best)
}

/// The counterexample system: normalize the coefficients by the torus
/// maximum and split off a one-dimensional input/output pair.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub alpha: Colligation,
    /// The torus maximum the coefficients were divided by.
    pub normalizer: f64,
}

pub fn build_counterexample_system(m: &OperatorTuple) -> Result<Counterexample> {
    if m.rows() != m.cols() {
        return Err(Error::ShapeMismatch("coefficients must be square".into()));
    }
    if m.rows() < 2 {
        return Err(Error::DomainViolation("need matrix dimension at least 2 to split".into()));
    }
    if m.mats().iter().all(|mat| mat.max_abs() == 0.0) {
        return Err(Error::DomainViolation("degenerate normalizer: all coefficients zero".into()));
    }
    let normalizer = reference_rhs(m);
    let g = m.map(|mat| mat.scale(C64::new(1.0 / normalizer, 0.0)));
    let alpha = Colligation::from_stacked(&g, m.rows() - 1)?;
    Ok(Counterexample { alpha, normalizer })
}

/// Extends a 3-parameter witness to n > 3 parameters by appending small
/// multiples of the identity to the coefficients and zero operators to the
/// tuple; the violation survives when the padding respects the stated bound.
pub fn extend_witness(w: &ViolationWitness, n: usize, pad_norm: f64) -> Result<ViolationWitness> {
    if w.m.n() != 3 {
        return Err(Error::PreconditionFailed("extension starts from a 3-parameter witness".into()));
    }
    if n <= 3 {
        return Err(Error::DomainViolation("extension target must exceed 3 parameters".into()));
    }
    if pad_norm < 0.0 {
        return Err(Error::DomainViolation("padding norm must be nonnegative".into()));
    }
    let bound = (w.ratio - 1.0) * w.rhs / (4.0 * (n - 3) as f64);
    if pad_norm > bound {
        return Err(Error::PreconditionFailed(format!(
            "padding norm {pad_norm:.3e} exceeds the safe bound {bound:.3e}"
        )));
    }
    let dim = w.m.rows();
    let mut mats = w.m.mats().to_vec();
    for _ in 3..n {
        mats.push(CMatrix::identity(dim).scale(C64::new(pad_norm, 0.0)));
    }
    let m = OperatorTuple::new(mats)?;
    let mut tmats = w.t.mats().to_vec();
    for _ in 3..n {
        tmats.push(CMatrix::zeros(w.t.dim(), w.t.dim()));
    }
    let t = CommutingTuple::with_tolerances(
        tmats,
        w.t.commutator_tol(),
        w.t.contraction_tol(),
    )?;
    Ok(finalize_witness(m, t, w.seed))
}

/// Torus report for a counterexample's normalized pencil, at validation
/// density. The verdict should be `Dissipative` by construction.
pub fn check_counterexample_dissipative(ce: &Counterexample) -> Verdict {
    let g = ce.alpha.stacked();
    torus_norm_max(&g, validation_grid(g.n()), VALIDATION_RESTARTS, VALIDATION_SEED)
        .expect("grid at least 2")
        .verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn varopoulos_basis_vectors() {
        let e = |k: usize| {
            let mut v = vec![C64::new(0.0, 0.0); 3];
            v[k] = C64::new(1.0, 0.0);
            v
        };
        let x = vec![e(0), e(1), e(2)];
        let t = varopoulos_tuple(&x, &x).unwrap();
        assert_eq!(t.dim(), 5);
        // T_k T_l (a, v, b) = (0, 0, a delta_kl)
        for k in 0..3 {
            for l in 0..3 {
                let prod = t.mat(k).matmul(t.mat(l));
                let expect = if k == l { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[(4, 0)].re, expect, epsilon = 1e-15);
                // order-3 nilpotency
                for j in 0..3 {
                    assert_abs_diff_eq!(
                        prod.matmul(t.mat(j)).max_abs(),
                        0.0,
                        epsilon = 1e-15
                    );
                }
            }
        }
        // norm = max of the two vector norms
        assert_abs_diff_eq!(t.mat(0).spectral_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn varopoulos_rejects_asymmetric_pairing() {
        let x = vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ];
        let y = vec![
            vec![C64::new(0.0, 0.0), C64::new(0.7, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ];
        assert!(matches!(varopoulos_tuple(&x, &y), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn pauli_witness_is_violation() {
        let w = pauli_witness();
        assert_abs_diff_eq!(w.lhs, 3.0 * WITNESS_RADIUS, epsilon = 1e-9);
        assert_abs_diff_eq!(w.rhs, 6f64.sqrt(), epsilon = 1e-7);
        assert!(w.is_violation(), "ratio {}", w.ratio);
        assert_abs_diff_eq!(w.ratio, (1.5f64).sqrt() * WITNESS_RADIUS, epsilon = 1e-6);
        let validation = validate_witness(&w).unwrap();
        assert!(validation.is_violation);
        assert!(validation.ratio_gap <= 1e-10);
    }

    #[test]
    fn counterexample_system_shapes() {
        let ce = build_counterexample_system(&pauli_coefficients()).unwrap();
        assert_eq!(ce.alpha.dim_state(), 1);
        assert_eq!(ce.alpha.dim_in(), 1);
        assert_eq!(ce.alpha.dim_out(), 1);
        assert_abs_diff_eq!(ce.normalizer, 6f64.sqrt(), epsilon = 1e-7);
        assert_eq!(check_counterexample_dissipative(&ce), Verdict::Dissipative);
    }

    #[test]
    fn extension_preserves_violation() {
        let w = pauli_witness();
        let bound = (w.ratio - 1.0) * w.rhs / 4.0;
        let extended = extend_witness(&w, 4, bound * 0.5).unwrap();
        assert_eq!(extended.m.n(), 4);
        assert!(extended.is_violation(), "extended ratio {}", extended.ratio);
        // zero padding leaves both sides unchanged
        let same = extend_witness(&w, 4, 0.0).unwrap();
        assert_abs_diff_eq!(same.lhs, w.lhs, epsilon = 1e-12);
        assert_abs_diff_eq!(same.rhs, w.rhs, epsilon = 1e-9);
        // too-large padding is rejected with the computed bound
        assert!(matches!(
            extend_witness(&w, 4, bound * 4.1),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
