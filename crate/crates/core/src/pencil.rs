//! The linear pencil L_G(z) = sum_k z_k G_k: evaluation, norm maximization
//! over the torus, and dissipativity / conservativity decisions.
//!
//! Conservativity (every torus evaluation unitary) is decided exactly through
//! Fourier coefficient matching: (zG)^H (zG) == I for all torus z iff the
//! constant term sum_k G_k^H G_k equals I and every cross term G_k^H G_l
//! (k != l) vanishes, and dually for (zG)(zG)^H. Dissipativity is only
//! co-semidecidable: a violation comes with a witness point, the dissipative
//! verdict is a search outcome qualified by grid density and restarts.

use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};
use crate::tuple::{OperatorTuple, TorusPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Hard cap on the number of torus samples in one search pass.
pub const GRID_CAP: usize = 1 << 20;
/// Margin above 1 at which a witnessed norm counts as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-9;
/// Default tolerance for the algebraic conservativity residuals.
pub const CONSERVATIVITY_TOL: f64 = 1e-10;

/// Evaluates sum_k z_k G_k.
pub fn eval_pencil(g: &OperatorTuple, z: &[C64]) -> Result<CMatrix> {
    if z.len() != g.n() {
        return Err(Error::ShapeMismatch(format!(
            "pencil has {} coefficients, point has {} coordinates",
            g.n(),
            z.len()
        )));
    }
    let mut acc = CMatrix::zeros(g.rows(), g.cols());
    for (k, m) in g.mats().iter().enumerate() {
        acc = acc.add(&m.scale(z[k]));
    }
    Ok(acc)
}

/// Outcome of the torus norm search.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// No torus point above 1 was found; heuristic, qualified by the search budget.
    Dissipative,
    /// A witness point with norm > 1 + margin exists and was re-checked.
    ViolationFound,
}

/// Report of a torus norm maximization run.
#[derive(Clone, Debug)]
pub struct PencilReport {
    pub torus_max: f64,
    pub argmax: TorusPoint,
    pub verdict: Verdict,
    /// ||sum_k G_k^H G_k||, a lower bound for the squared torus supremum.
    pub necessary_bound: f64,
    pub grid_density: usize,
    pub restarts: usize,
    pub seed: u64,
}

fn norm_at_phases(g: &OperatorTuple, phases: &[f64]) -> f64 {
    let z: Vec<C64> = phases.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    eval_pencil(g, &z).expect("phase count matches").spectral_norm()
}

/// Coordinate-wise golden-section ascent on the phase angles.
/// Deterministic; sweeps until the improvement per sweep drops below 1e-12.
fn phase_ascent(g: &OperatorTuple, start: &[f64], initial_window: f64) -> (Vec<f64>, f64) {
    phase_ascent_bounded(g, start, initial_window, 200)
}

pub(crate) fn phase_ascent_bounded(
    g: &OperatorTuple,
    start: &[f64],
    initial_window: f64,
    max_sweeps: usize,
) -> (Vec<f64>, f64) {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let n = start.len();
    let mut phases = start.to_vec();
    let mut best = norm_at_phases(g, &phases);
    let mut window = initial_window.max(1e-6);
    let mut sweeps_done = 0;
    while sweeps_done < max_sweeps {
        sweeps_done += 1;
        let before = best;
        for k in 0..n {
            let center = phases[k];
            let mut lo = center - window;
            let mut hi = center + window;
            let mut x1 = hi - GOLDEN * (hi - lo);
            let mut x2 = lo + GOLDEN * (hi - lo);
            let eval = |t: f64, phases: &mut Vec<f64>| {
                phases[k] = t;
                let v = norm_at_phases(g, phases);
                phases[k] = center;
                v
            };
            let mut f1 = eval(x1, &mut phases);
            let mut f2 = eval(x2, &mut phases);
            for _ in 0..60 {
                if hi - lo < 1e-13 {
                    break;
                }
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + GOLDEN * (hi - lo);
                    f2 = eval(x2, &mut phases);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - GOLDEN * (hi - lo);
                    f1 = eval(x1, &mut phases);
                }
            }
            let cand = 0.5 * (lo + hi);
            let fc = eval(cand, &mut phases);
            if fc > best {
                best = fc;
                phases[k] = cand;
            }
        }
        // shrink the window only once a sweep stalls at the current scale
        if best - before < 1e-12 {
            if window <= 1e-9 {
                break;
            }
            window *= 0.25;
        }
    }
    (phases, best)
}

/// Phase points guaranteed to reach at least max_k ||G_k||: align the other
/// coefficients with the top singular pair of G_k.
fn coefficient_aligned_starts(g: &OperatorTuple) -> Vec<Vec<f64>> {
    let mut starts = vec![vec![0.0; g.n()]];
    for k in 0..g.n() {
        let (u, s, v) = g.mat(k).svd();
        if s.first().copied().unwrap_or(0.0) == 0.0 {
            continue;
        }
        let mut phases = vec![0.0; g.n()];
        for (j, m) in g.mats().iter().enumerate() {
            // <u, G_j v> for the top pair of G_k
            let mut overlap = C64::new(0.0, 0.0);
            let gv = m.matmul(&CMatrix::from_fn(m.cols(), 1, |i, _| v[(i, 0)]));
            for i in 0..m.rows() {
                overlap += u[(i, 0)].conj() * gv[(i, 0)];
            }
            phases[j] = if overlap.norm() > 0.0 { -overlap.arg() } else { 0.0 };
        }
        starts.push(phases);
    }
    starts
}

/// Options for the torus search; the plain entry point uses defaults.
#[derive(Clone, Debug)]
pub struct TorusSearchOptions {
    pub grid: usize,
    pub restarts: usize,
    pub seed: u64,
    /// When the full grid exceeds the cap, fall back to quasi-random sampling.
    pub allow_sampling_fallback: bool,
}

impl TorusSearchOptions {
    pub fn new(grid: usize, restarts: usize, seed: u64) -> Self {
        TorusSearchOptions { grid, restarts, seed, allow_sampling_fallback: true }
    }
}

/// Best lower bound on sup over the torus of ||sum z_k G_k||, from a phase
/// grid (or quasi-random fallback) refined by coordinate ascent.
pub fn torus_norm_max(
    g: &OperatorTuple,
    grid: usize,
    restarts: usize,
    seed: u64,
) -> Result<PencilReport> {
    torus_norm_max_with(g, &TorusSearchOptions::new(grid, restarts, seed))
}

pub fn torus_norm_max_with(g: &OperatorTuple, opts: &TorusSearchOptions) -> Result<PencilReport> {
    if opts.grid < 2 {
        return Err(Error::InvalidConfig("grid density must be at least 2".into()));
    }
    let n = g.n();
    let total = opts.grid.checked_pow(n as u32).unwrap_or(usize::MAX);
    let grid_points: Vec<Vec<f64>> = if total <= GRID_CAP {
        (0..total)
            .map(|idx| {
                let mut rem = idx;
                (0..n)
                    .map(|_| {
                        let step = rem % opts.grid;
                        rem /= opts.grid;
                        TAU * step as f64 / opts.grid as f64
                    })
                    .collect()
            })
            .collect()
    } else if opts.allow_sampling_fallback {
        // Weyl low-discrepancy sequence, offset by the seed.
        let alphas: Vec<f64> = primes(n).iter().map(|&p| (p as f64).sqrt().fract()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let offsets: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        (0..GRID_CAP)
            .map(|i| {
                (0..n).map(|k| TAU * ((offsets[k] + i as f64 * alphas[k]).fract())).collect()
            })
            .collect()
    } else {
        return Err(Error::InvalidConfig(format!(
            "grid^N = {}^{} exceeds the cap {} and sampling fallback is disabled",
            opts.grid, n, GRID_CAP
        )));
    };

    // deterministic parallel scan; ties broken by smallest sample index
    let (best_idx, _best_val) = grid_points
        .par_iter()
        .enumerate()
        .map(|(i, phases)| (i, norm_at_phases(g, phases)))
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |acc, cur| {
                if cur.1 > acc.1 || (cur.1 == acc.1 && cur.0 < acc.0) {
                    cur
                } else {
                    acc
                }
            },
        );
    let grid_window = TAU / opts.grid as f64;

    let mut starts: Vec<(Vec<f64>, f64)> = Vec::new();
    if best_idx != usize::MAX {
        starts.push((grid_points[best_idx].clone(), grid_window));
    }
    for aligned in coefficient_aligned_starts(g) {
        starts.push((aligned, grid_window.max(0.5)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    for _ in 0..opts.restarts {
        let phases: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
        starts.push((phases, 0.8));
    }

    let refined: Vec<(usize, Vec<f64>, f64)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, (phases, window))| {
            let (p, v) = phase_ascent(g, phases, *window);
            (i, p, v)
        })
        .collect();
    let mut best_phases = vec![0.0; n];
    let mut best = f64::NEG_INFINITY;
    let mut best_start = usize::MAX;
    for (i, phases, val) in refined {
        if val > best || (val == best && i < best_start) {
            best = val;
            best_phases = phases;
            best_start = i;
        }
    }

    // independent re-check of the winning point
    let argmax = TorusPoint::from_phases(&best_phases);
    let recheck = eval_pencil(g, argmax.coords())?.spectral_norm();
    let torus_max = recheck.max(best);

    let gram = gram_sum(g, true);
    let necessary_bound = gram.spectral_norm();
    let verdict = if torus_max > 1.0 + VIOLATION_MARGIN {
        Verdict::ViolationFound
    } else {
        Verdict::Dissipative
    };
    Ok(PencilReport {
        torus_max,
        argmax,
        verdict,
        necessary_bound,
        grid_density: opts.grid,
        restarts: opts.restarts,
        seed: opts.seed,
    })
}

fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut cand = 2u64;
    while out.len() < n {
        if (2..cand).take_while(|d| d * d <= cand).all(|d| cand % d != 0) {
            out.push(cand);
        }
        cand += 1;
    }
    out
}

fn gram_sum(g: &OperatorTuple, adjoint_left: bool) -> CMatrix {
    let dim = if adjoint_left { g.cols() } else { g.rows() };
    let mut acc = CMatrix::zeros(dim, dim);
    for m in g.mats() {
        let term = if adjoint_left { m.adjoint().matmul(m) } else { m.matmul(&m.adjoint()) };
        acc = acc.add(&term);
    }
    acc
}

/// Residuals of the four algebraic conservativity families.
#[derive(Clone, Debug)]
pub struct ConservativityCheck {
    /// max over k != l of ||G_k^H G_l||
    pub cross_isometry: f64,
    /// max over k != l of ||G_k G_l^H||
    pub cross_coisometry: f64,
    /// ||sum G_k^H G_k - I||
    pub isometry_defect: f64,
    /// ||sum G_k G_k^H - I||
    pub coisometry_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ConservativityCheck {
    pub fn max_residual(&self) -> f64 {
        self.cross_isometry
            .max(self.cross_coisometry)
            .max(self.isometry_defect)
            .max(self.coisometry_defect)
    }
}

/// Decides conservativity exactly via the four residual families.
pub fn is_conservative_algebraic(g: &OperatorTuple, tol: f64) -> ConservativityCheck {
    let mut cross_isometry: f64 = 0.0;
    let mut cross_coisometry: f64 = 0.0;
    for k in 0..g.n() {
        for l in 0..g.n() {
            if k == l {
                continue;
            }
            cross_isometry =
                cross_isometry.max(g.mat(k).adjoint().matmul(g.mat(l)).spectral_norm());
            cross_coisometry =
                cross_coisometry.max(g.mat(k).matmul(&g.mat(l).adjoint()).spectral_norm());
        }
    }
    let isometry_defect =
        gram_sum(g, true).sub(&CMatrix::identity(g.cols())).spectral_norm();
    let coisometry_defect =
        gram_sum(g, false).sub(&CMatrix::identity(g.rows())).spectral_norm();
    let mut check = ConservativityCheck {
        cross_isometry,
        cross_coisometry,
        isometry_defect,
        coisometry_defect,
        tol,
        pass: false,
    };
    check.pass = check.max_residual() <= tol;
    check
}

/// A Haar-distributed random unitary (complex Ginibre followed by Gram-Schmidt
/// with phase fixing on the diagonal of R).
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    if dim == 0 {
        return CMatrix::zeros(0, 0);
    }
    loop {
        let ginibre = CMatrix::from_fn(dim, dim, |_, _| {
            C64::new(standard_normal(rng), standard_normal(rng))
        });
        let q = ginibre.column_span_basis(1e-10);
        if q.cols() == dim {
            return q;
        }
    }
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// G_k = P_k U for a Haar unitary U and a random orthogonal projection
/// resolution sum_k P_k = I. Output passes the algebraic check at 1e-10.
pub fn random_conservative_pencil(n: usize, dim: usize, seed: u64) -> OperatorTuple {
    assert!(n >= 1, "need at least one parameter");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(dim, &mut rng);
    let q = random_unitary(dim, &mut rng);
    // random composition of dim into n nonnegative parts
    let mut sizes = vec![0usize; n];
    for _ in 0..dim {
        sizes[rng.gen_range(0..n)] += 1;
    }
    let mut mats = Vec::with_capacity(n);
    let mut offset = 0;
    for &size in &sizes {
        // P = Q diag(block) Q^H, then G = P U
        let mut diag = CMatrix::zeros(dim, dim);
        for i in offset..offset + size {
            diag[(i, i)] = C64::new(1.0, 0.0);
        }
        offset += size;
        let p = q.matmul(&diag).matmul(&q.adjoint());
        mats.push(p.matmul(&u));
    }
    OperatorTuple::new(mats).expect("shapes agree by construction")
}

/// Seeded random torus points, for sampled unitarity checks.
pub fn random_torus_points(n: usize, count: usize, seed: u64) -> Vec<TorusPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let phases: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
            TorusPoint::from_phases(&phases)
        })
        .collect()
}
