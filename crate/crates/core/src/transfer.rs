//! Transfer function of a colligation: point evaluation through the
//! resolvent, Taylor coefficients through the multipower algebra, and
//! evaluation on commuting contraction tuples (the generalized Schur
//! class membership probe).

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};
use crate::multipower::{polynomial_coefficient, sym_power, SymPowerKind};
use crate::tuple::{MultiIndex, OperatorTuple};

/// Condition-number guard for resolvent solves.
pub const RESOLVENT_COND_CAP: f64 = 1e12;

/// N pairwise commuting contractions on a common space.
#[derive(Clone, Debug)]
pub struct CommutingTuple {
    mats: Vec<CMatrix>,
    commutator_tol: f64,
    contraction_tol: f64,
}

impl CommutingTuple {
    pub const DEFAULT_COMMUTATOR_TOL: f64 = 1e-12;
    pub const DEFAULT_CONTRACTION_TOL: f64 = 1e-10;

    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerances(
            mats,
            Self::DEFAULT_COMMUTATOR_TOL,
            Self::DEFAULT_CONTRACTION_TOL,
        )
    }

    pub fn with_tolerances(
        mats: Vec<CMatrix>,
        commutator_tol: f64,
        contraction_tol: f64,
    ) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::ShapeMismatch("need at least one operator".into()));
        }
        let dim = mats[0].rows();
        for (k, m) in mats.iter().enumerate() {
            if !m.is_square() || m.rows() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "operator {k} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            let norm = m.spectral_norm();
            if norm > 1.0 + contraction_tol {
                return Err(Error::DomainViolation(format!(
                    "operator {k} has norm {norm}, not a contraction"
                )));
            }
        }
        for k in 0..mats.len() {
            for l in (k + 1)..mats.len() {
                let comm = mats[k].matmul(&mats[l]).sub(&mats[l].matmul(&mats[k]));
                let res = comm.spectral_norm();
                if res > commutator_tol {
                    return Err(Error::DomainViolation(format!(
                        "operators {k} and {l} fail to commute, residual {res:.3e}"
                    )));
                }
            }
        }
        Ok(CommutingTuple { mats, commutator_tol, contraction_tol })
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn mat(&self, k: usize) -> &CMatrix {
        &self.mats[k]
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn commutator_tol(&self) -> f64 {
        self.commutator_tol
    }

    pub fn contraction_tol(&self) -> f64 {
        self.contraction_tol
    }
}

/// Value of a tuple evaluation together with the numbers that qualify it.
#[derive(Clone, Debug)]
pub struct TupleEvalResult {
    pub value: CMatrix,
    pub norm: f64,
    pub r: f64,
    /// 1 - ||sum_k A_k (x) r T_k||; positive whenever the resolvent formula applies.
    pub resolvent_margin: f64,
}

/// theta(z) = zD + zC (I - zA)^{-1} zB.
pub fn transfer_eval(alpha: &Colligation, z: &[C64]) -> Result<CMatrix> {
    if z.len() != alpha.n() {
        return Err(Error::ShapeMismatch(format!(
            "system has {} parameters, point has {}",
            alpha.n(),
            z.len()
        )));
    }
    let zd = weighted_sum(alpha.d(), z);
    if alpha.dim_state() == 0 {
        return Ok(zd);
    }
    let za = weighted_sum(alpha.a(), z);
    let zb = weighted_sum(alpha.b(), z);
    let zc = weighted_sum(alpha.c(), z);
    let resolvent_base = CMatrix::identity(alpha.dim_state()).sub(&za);
    let cond = resolvent_base.condition_estimate();
    if !(cond <= RESOLVENT_COND_CAP) {
        return Err(Error::NearSingular { cond });
    }
    let solved = resolvent_base.solve(&zb)?;
    Ok(zd.add(&zc.matmul(&solved)))
}

fn weighted_sum(t: &OperatorTuple, z: &[C64]) -> CMatrix {
    let mut acc = CMatrix::zeros(t.rows(), t.cols());
    for (k, m) in t.mats().iter().enumerate() {
        acc = acc.add(&m.scale(z[k]));
    }
    acc
}

/// Taylor coefficient of the transfer function at z^s: zero at s = 0, D_k at
/// s = e_k, and c_s (CbA#B)^s for |s| >= 2 — computed algebraically, never by
/// differentiation.
pub fn taylor_coeff(alpha: &Colligation, s: &MultiIndex) -> Result<CMatrix> {
    if s.n() != alpha.n() {
        return Err(Error::ShapeMismatch("multi-index length must match system".into()));
    }
    if s.is_zero() {
        return Ok(CMatrix::zeros(alpha.dim_out(), alpha.dim_in()));
    }
    if s.is_unit() {
        let k = (0..s.n()).find(|&k| s.component(k) == 1).unwrap();
        return Ok(alpha.d().mat(k).clone());
    }
    let cs = polynomial_coefficient(s)? as f64;
    let word =
        sym_power(SymPowerKind::FlatSharp, alpha.a(), Some(alpha.b()), Some(alpha.c()), s)?;
    Ok(word.scale(C64::new(cs, 0.0)))
}

/// sum_k G_k (x) r T_k and its norm (exact, finite sum).
pub fn pencil_on_tuple(g: &OperatorTuple, t: &CommutingTuple, r: f64) -> Result<TupleEvalResult> {
    if g.n() != t.n() {
        return Err(Error::ShapeMismatch("pencil and tuple disagree on N".into()));
    }
    let mut acc = CMatrix::zeros(g.rows() * t.dim(), g.cols() * t.dim());
    for k in 0..g.n() {
        let term = CMatrix::kron(g.mat(k), &t.mat(k).scale(C64::new(r, 0.0)))?;
        acc = acc.add(&term);
    }
    let norm = acc.spectral_norm();
    Ok(TupleEvalResult { value: acc, norm, r, resolvent_margin: f64::NAN })
}

/// theta(rT) via the tensor resolvent identity
/// (sum D_k (x) rT_k) + (sum C_k (x) rT_k)(I - sum A_k (x) rT_k)^{-1}(sum B_k (x) rT_k).
pub fn eval_on_tuple(alpha: &Colligation, t: &CommutingTuple, r: f64) -> Result<TupleEvalResult> {
    if alpha.n() != t.n() {
        return Err(Error::ShapeMismatch("system and tuple disagree on N".into()));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::DomainViolation(format!("radius r = {r} must lie in [0, 1)")));
    }
    let dh = t.dim();
    let lift = |tuple: &OperatorTuple| -> Result<CMatrix> {
        let mut acc = CMatrix::zeros(tuple.rows() * dh, tuple.cols() * dh);
        for k in 0..tuple.n() {
            acc = acc.add(&CMatrix::kron(tuple.mat(k), &t.mat(k).scale(C64::new(r, 0.0)))?);
        }
        Ok(acc)
    };
    let d_term = lift(alpha.d())?;
    if alpha.dim_state() == 0 {
        let norm = d_term.spectral_norm();
        return Ok(TupleEvalResult { value: d_term, norm, r, resolvent_margin: 1.0 });
    }
    let a_term = lift(alpha.a())?;
    let margin = 1.0 - a_term.spectral_norm();
    if margin <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "resolvent margin {margin:.3e} is not positive; the series need not converge"
        )));
    }
    let b_term = lift(alpha.b())?;
    let c_term = lift(alpha.c())?;
    let base = CMatrix::identity(a_term.rows()).sub(&a_term);
    let solved = base.solve(&b_term)?;
    let value = d_term.add(&c_term.matmul(&solved));
    let norm = value.spectral_norm();
    Ok(TupleEvalResult { value, norm, r, resolvent_margin: margin })
}

/// Truncated series sum_{1 <= |t| <= max_degree} theta_t (x) (rT)^t; the test
/// oracle for the resolvent identity.
pub fn eval_on_tuple_series(
    alpha: &Colligation,
    t: &CommutingTuple,
    r: f64,
    max_degree: usize,
) -> Result<CMatrix> {
    let dh = t.dim();
    let mut acc = CMatrix::zeros(alpha.dim_out() * dh, alpha.dim_in() * dh);
    for s in MultiIndex::up_to_degree(alpha.n(), max_degree, false) {
        let coeff = taylor_coeff(alpha, &s)?;
        let mut power = CMatrix::identity(dh);
        for k in 0..s.n() {
            for _ in 0..s.component(k) {
                power = power.matmul(&t.mat(k).scale(C64::new(r, 0.0)));
            }
        }
        acc = acc.add(&CMatrix::kron(&coeff, &power)?);
    }
    Ok(acc)
}
