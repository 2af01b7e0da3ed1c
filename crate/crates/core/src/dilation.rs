//! Dilation machinery: moment-identity verification (symmetrized and
//! torus-sampled), the Krylov subspace construction behind the one-parameter
//! dilation lemma, block assembly and extraction of conservative dilations,
//! compression, and uniform minimal reduction.
//!
//! A system alpha-tilde dilates alpha when every torus sample of the
//! one-parameter moment identities holds, equivalently when the four
//! symmetrized multipower families agree under compression to the embedded
//! state space. Both verifiers are provided and must agree; tests exercise
//! that equivalence.

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};
use crate::multipower::{sym_power, SymPowerKind};
use crate::tuple::{MultiIndex, OperatorTuple, TorusPoint};

/// Rank threshold for orthonormalization decisions, relative to the largest
/// column norm.
pub const RANK_TOL: f64 = 1e-10;
/// Orthonormality defect allowed in a stored basis.
pub const BASIS_TOL: f64 = 1e-10;
/// Moment tolerance used by the subspace construction precondition.
pub const SUBSPACE_MOMENT_TOL: f64 = 1e-8;

/// An orthonormal column frame spanning a subspace of an ambient space.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    basis: CMatrix,
}

impl SubspaceBasis {
    pub fn new(basis: CMatrix) -> Result<Self> {
        let gram = basis.adjoint().matmul(&basis);
        let defect = gram.sub(&CMatrix::identity(basis.cols())).spectral_norm();
        if defect > BASIS_TOL {
            return Err(Error::DomainViolation(format!(
                "columns are not orthonormal, defect {defect:.3e}"
            )));
        }
        Ok(SubspaceBasis { ambient_dim: basis.rows(), basis })
    }

    /// Orthonormalizes the column span of an arbitrary spanning set.
    pub fn span(columns: &CMatrix) -> Self {
        let basis = columns.column_span_basis(RANK_TOL);
        SubspaceBasis { ambient_dim: columns.rows(), basis }
    }

    /// The last `dim` coordinates of an ambient space.
    pub fn trailing(ambient_dim: usize, dim: usize) -> Self {
        assert!(dim <= ambient_dim);
        let basis = CMatrix::from_fn(ambient_dim, dim, |i, j| {
            if i == ambient_dim - dim + j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        SubspaceBasis { ambient_dim, basis }
    }

    /// The first `dim` coordinates of an ambient space.
    pub fn leading(ambient_dim: usize, dim: usize) -> Self {
        assert!(dim <= ambient_dim);
        let basis = CMatrix::from_fn(ambient_dim, dim, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        SubspaceBasis { ambient_dim, basis }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::leading(ambient_dim, ambient_dim)
    }

    pub fn empty(ambient_dim: usize) -> Self {
        SubspaceBasis { ambient_dim, basis: CMatrix::zeros(ambient_dim, 0) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthocomplement within the ambient space.
    pub fn complement(&self) -> SubspaceBasis {
        let probe = CMatrix::hconcat(&self.basis, &CMatrix::identity(self.ambient_dim));
        let all = probe.column_span_basis(RANK_TOL);
        let extra = all.cols() - self.dim();
        SubspaceBasis {
            ambient_dim: self.ambient_dim,
            basis: all.block(0, self.dim(), self.ambient_dim, extra),
        }
    }

    /// Compression E^H M E of an ambient operator to this subspace.
    pub fn compress_operator(&self, m: &CMatrix) -> CMatrix {
        self.basis.adjoint().matmul(m).matmul(&self.basis)
    }
}

const FAMILY_LABELS: [&str; 4] = ["plain", "sharp-b", "flat-c", "flat-sharp"];

/// Residual summary of a moment-identity verification run.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub degree_cap: usize,
    pub tol: f64,
    /// Per-family maxima: plain, sharp-b, flat-c, flat-sharp.
    pub family_residuals: [f64; 4],
    /// Max residual per degree (index = degree 0..=cap).
    pub per_degree: Vec<f64>,
    pub pass: bool,
}

impl MomentReport {
    pub fn max_residual(&self) -> f64 {
        self.family_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn worst_family(&self) -> (&'static str, f64) {
        let (idx, &val) = self
            .family_residuals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        (FAMILY_LABELS[idx], val)
    }
}

fn check_dilation_shapes(
    tilde: &Colligation,
    alpha: &Colligation,
    embed: &SubspaceBasis,
) -> Result<()> {
    if tilde.n() != alpha.n() {
        return Err(Error::StructuralMismatch("parameter counts differ".into()));
    }
    if tilde.dim_in() != alpha.dim_in() || tilde.dim_out() != alpha.dim_out() {
        return Err(Error::StructuralMismatch("input/output spaces differ".into()));
    }
    if !tilde.d_equals(alpha) {
        return Err(Error::StructuralMismatch("D tuples must agree exactly".into()));
    }
    if embed.ambient_dim() != tilde.dim_state() || embed.dim() != alpha.dim_state() {
        return Err(Error::StructuralMismatch(format!(
            "embedding maps a {}-dimensional space into a {}-dimensional one, expected {} into {}",
            embed.dim(),
            embed.ambient_dim(),
            alpha.dim_state(),
            tilde.dim_state(),
        )));
    }
    Ok(())
}

/// Verifies the symmetrized moment identities up to degree `degree_cap`.
pub fn is_dilation(
    tilde: &Colligation,
    alpha: &Colligation,
    embed: &SubspaceBasis,
    degree_cap: usize,
    tol: f64,
) -> Result<MomentReport> {
    check_dilation_shapes(tilde, alpha, embed)?;
    let e = embed.matrix();
    let eh = e.adjoint();
    let mut family_residuals = [0.0f64; 4];
    let mut per_degree = vec![0.0f64; degree_cap + 1];

    for s in MultiIndex::up_to_degree(alpha.n(), degree_cap, true) {
        let d = s.degree();
        // plain: A^s vs E^H Atilde^s E
        let small = sym_power(SymPowerKind::Plain, alpha.a(), None, None, &s)?;
        let big = sym_power(SymPowerKind::Plain, tilde.a(), None, None, &s)?;
        let r = small.sub(&eh.matmul(&big).matmul(e)).spectral_norm();
        family_residuals[0] = family_residuals[0].max(r);
        per_degree[d] = per_degree[d].max(r);

        if d >= 1 {
            let small = sym_power(SymPowerKind::SharpB, alpha.a(), Some(alpha.b()), None, &s)?;
            let big = sym_power(SymPowerKind::SharpB, tilde.a(), Some(tilde.b()), None, &s)?;
            let r = small.sub(&eh.matmul(&big)).spectral_norm();
            family_residuals[1] = family_residuals[1].max(r);
            per_degree[d] = per_degree[d].max(r);

            let small = sym_power(SymPowerKind::FlatC, alpha.a(), None, Some(alpha.c()), &s)?;
            let big = sym_power(SymPowerKind::FlatC, tilde.a(), None, Some(tilde.c()), &s)?;
            let r = small.sub(&big.matmul(e)).spectral_norm();
            family_residuals[2] = family_residuals[2].max(r);
            per_degree[d] = per_degree[d].max(r);
        }
        if d >= 2 {
            let small = sym_power(
                SymPowerKind::FlatSharp,
                alpha.a(),
                Some(alpha.b()),
                Some(alpha.c()),
                &s,
            )?;
            let big = sym_power(
                SymPowerKind::FlatSharp,
                tilde.a(),
                Some(tilde.b()),
                Some(tilde.c()),
                &s,
            )?;
            let r = small.sub(&big).spectral_norm();
            family_residuals[3] = family_residuals[3].max(r);
            per_degree[d] = per_degree[d].max(r);
        }
    }
    let pass = family_residuals.iter().all(|&r| r <= tol);
    Ok(MomentReport { degree_cap, tol, family_residuals, per_degree, pass })
}

/// One-parameter slice of a colligation at a torus point: (zA, zB, zC).
fn zeta_slice(alpha: &Colligation, zeta: &TorusPoint) -> (CMatrix, CMatrix, CMatrix) {
    let weigh = |t: &OperatorTuple| {
        let mut acc = CMatrix::zeros(t.rows(), t.cols());
        for (k, m) in t.mats().iter().enumerate() {
            acc = acc.add(&m.scale(zeta.coords()[k]));
        }
        acc
    };
    (weigh(alpha.a()), weigh(alpha.b()), weigh(alpha.c()))
}

/// Verifies the torus-sampled one-parameter moment identities at each sample,
/// powers 0..=degree_cap. An empty sample list passes vacuously.
pub fn is_dilation_sampled(
    tilde: &Colligation,
    alpha: &Colligation,
    embed: &SubspaceBasis,
    zeta_samples: &[TorusPoint],
    degree_cap: usize,
    tol: f64,
) -> Result<MomentReport> {
    check_dilation_shapes(tilde, alpha, embed)?;
    let e = embed.matrix();
    let eh = e.adjoint();
    let mut family_residuals = [0.0f64; 4];
    let mut per_degree = vec![0.0f64; degree_cap + 1];

    for zeta in zeta_samples {
        if zeta.n() != alpha.n() {
            return Err(Error::ShapeMismatch("torus sample has wrong arity".into()));
        }
        let (a, b, c) = zeta_slice(alpha, zeta);
        let (at, bt, ct) = zeta_slice(tilde, zeta);
        let mut small_pow = CMatrix::identity(alpha.dim_state());
        let mut big_pow = CMatrix::identity(tilde.dim_state());
        for n in 0..=degree_cap {
            if n > 0 {
                small_pow = a.matmul(&small_pow);
                big_pow = at.matmul(&big_pow);
            }
            let compressed = eh.matmul(&big_pow).matmul(e);
            let residuals = [
                small_pow.sub(&compressed).spectral_norm(),
                small_pow.matmul(&b).sub(&eh.matmul(&big_pow).matmul(&bt)).spectral_norm(),
                c.matmul(&small_pow).sub(&ct.matmul(&big_pow).matmul(e)).spectral_norm(),
                c.matmul(&small_pow)
                    .matmul(&b)
                    .sub(&ct.matmul(&big_pow).matmul(&bt))
                    .spectral_norm(),
            ];
            for (fam, &r) in residuals.iter().enumerate() {
                family_residuals[fam] = family_residuals[fam].max(r);
                per_degree[n] = per_degree[n].max(r);
            }
        }
    }
    let pass = family_residuals.iter().all(|&r| r <= tol);
    Ok(MomentReport { degree_cap, tol, family_residuals, per_degree, pass })
}

/// Grows span{ gens^w * seed } until the rank stabilizes.
fn krylov_span(gens: &[&CMatrix], seed: &CMatrix) -> CMatrix {
    let mut basis = seed.column_span_basis(RANK_TOL);
    loop {
        let mut grown = basis.clone();
        for g in gens {
            grown = CMatrix::hconcat(&grown, &g.matmul(&basis));
        }
        let next = grown.column_span_basis(RANK_TOL);
        if next.cols() == basis.cols() {
            return basis;
        }
        basis = next;
    }
}

/// The defect subspaces of the one-parameter system at a fixed torus point:
/// D = closed span of (zA-tilde)^n applied to ran(zA-tilde E - E zA) + ran(zB-tilde - E zB),
/// D* = the orthocomplement of (X + D).
pub fn build_subspaces_fixed_zeta(
    tilde: &Colligation,
    alpha: &Colligation,
    embed: &SubspaceBasis,
    zeta: &TorusPoint,
) -> Result<(SubspaceBasis, SubspaceBasis)> {
    let cap = tilde.dim_state();
    let report = is_dilation_sampled(
        tilde,
        alpha,
        embed,
        std::slice::from_ref(zeta),
        cap,
        SUBSPACE_MOMENT_TOL,
    )?;
    if !report.pass {
        let (family, residual) = report.worst_family();
        return Err(Error::PreconditionFailed(format!(
            "moment identities fail at this torus point: family {family} has residual {residual:.3e}"
        )));
    }
    let e = embed.matrix();
    let (a, b, _) = zeta_slice(alpha, zeta);
    let (at, bt, _) = zeta_slice(tilde, zeta);
    let gap_state = at.matmul(e).sub(&e.matmul(&a));
    let gap_input = bt.sub(&e.matmul(&b));
    let seed = CMatrix::hconcat(&gap_state, &gap_input);
    let defect = krylov_span(&[&at], &seed);
    let defect_basis = SubspaceBasis::span(&defect);
    let x_plus_d = CMatrix::hconcat(e, defect_basis.matrix());
    let dstar = SubspaceBasis::span(&x_plus_d).complement();
    Ok((defect_basis, dstar))
}

/// Builds the dilation from a realization beta of the stacked pencil:
/// state Y (+) X, with blocks
/// A-tilde_k = [[T_k, F_k|X], [P_X H_k, A_k]], B-tilde_k = [F_k|N-; B_k],
/// C-tilde_k = [P_N+ H_k, C_k], D-tilde = D.
pub fn assemble_dilation(
    beta: &Colligation,
    dim_state_alpha: usize,
    alpha: &Colligation,
) -> Result<Colligation> {
    if dim_state_alpha != alpha.dim_state() {
        return Err(Error::StructuralMismatch("designated state split disagrees with alpha".into()));
    }
    if beta.n() != alpha.n() {
        return Err(Error::StructuralMismatch("parameter counts differ".into()));
    }
    let dx = alpha.dim_state();
    let din = alpha.dim_in();
    let dout = alpha.dim_out();
    if beta.dim_in() != dx + din || beta.dim_out() != dx + dout {
        return Err(Error::StructuralMismatch(format!(
            "beta must map X(+)input to X(+)output; got {}->{}, expected {}->{}",
            beta.dim_in(),
            beta.dim_out(),
            dx + din,
            dx + dout
        )));
    }
    let stacked = alpha.stacked();
    for k in 0..beta.n() {
        let gap = beta.d().mat(k).sub(stacked.mat(k)).max_abs();
        if gap > 1e-12 {
            return Err(Error::StructuralMismatch(format!(
                "beta's S block {k} differs from alpha's stacked pencil by {gap:.3e}"
            )));
        }
    }
    let dy = beta.dim_state();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = Vec::new();
    for k in 0..beta.n() {
        let t = beta.a().mat(k);
        let f = beta.b().mat(k);
        let h = beta.c().mat(k);
        let f_state = f.block(0, 0, dy, dx);
        let f_input = f.block(0, dx, dy, din);
        let h_state = h.block(0, 0, dx, dy);
        let h_output = h.block(dx, 0, dout, dy);
        a.push(CMatrix::block2x2(t, &f_state, &h_state, alpha.a().mat(k)));
        b.push(CMatrix::vconcat(&f_input, alpha.b().mat(k)));
        c.push(CMatrix::hconcat(&h_output, alpha.c().mat(k)));
    }
    Colligation::new(
        OperatorTuple::new(a)?,
        OperatorTuple::new(b)?,
        OperatorTuple::new(c)?,
        alpha.d().clone(),
    )
}

/// Re-partitions a dilation around an embedded state space, producing the
/// system beta on (X-tilde minus X, X(+)input, X(+)output) whose S block is
/// the compressed stacked pencil.
pub fn extract_embedded(tilde: &Colligation, embed: &SubspaceBasis) -> Result<Colligation> {
    if embed.ambient_dim() != tilde.dim_state() {
        return Err(Error::ShapeMismatch("embedding ambient dimension".into()));
    }
    let e = embed.matrix();
    let eh = e.adjoint();
    let comp = embed.complement();
    let ep = comp.matrix();
    let eph = ep.adjoint();
    let mut t = Vec::new();
    let mut f = Vec::new();
    let mut h = Vec::new();
    let mut s = Vec::new();
    for k in 0..tilde.n() {
        let at = tilde.a().mat(k);
        let bt = tilde.b().mat(k);
        let ct = tilde.c().mat(k);
        let dt = tilde.d().mat(k);
        t.push(eph.matmul(at).matmul(ep));
        f.push(CMatrix::hconcat(&eph.matmul(at).matmul(e), &eph.matmul(bt)));
        h.push(CMatrix::vconcat(&eh.matmul(at).matmul(ep), &ct.matmul(ep)));
        s.push(CMatrix::block2x2(
            &eh.matmul(at).matmul(e),
            &eh.matmul(bt),
            &ct.matmul(e),
            dt,
        ));
    }
    Colligation::new(
        OperatorTuple::new(t)?,
        OperatorTuple::new(f)?,
        OperatorTuple::new(h)?,
        OperatorTuple::new(s)?,
    )
}

/// Per-degree maxima of the symmetrized words H-flat-T-sharp-F, degrees
/// 2..=cap+2. All zero iff the realization contributes nothing beyond its
/// constant block at the checked degrees.
pub fn vanish_residual(
    beta: &Colligation,
    dim_state_alpha: usize,
    degree_cap: usize,
) -> Result<Vec<f64>> {
    if beta.dim_in() < dim_state_alpha || beta.dim_out() < dim_state_alpha {
        return Err(Error::StructuralMismatch(
            "state split exceeds beta's input or output dimension".into(),
        ));
    }
    let mut out = Vec::with_capacity(degree_cap + 1);
    for degree in 2..=degree_cap + 2 {
        let mut worst = 0.0f64;
        for s in MultiIndex::with_degree(beta.n(), degree) {
            let word =
                sym_power(SymPowerKind::FlatSharp, beta.a(), Some(beta.b()), Some(beta.c()), &s)?;
            worst = worst.max(word.spectral_norm());
        }
        out.push(worst);
    }
    Ok(out)
}

/// Compression of a colligation onto a subspace of its state space; D is
/// unchanged.
pub fn compress(alpha: &Colligation, x0: &SubspaceBasis) -> Result<Colligation> {
    if x0.ambient_dim() != alpha.dim_state() {
        return Err(Error::ShapeMismatch("subspace ambient must be the state space".into()));
    }
    let e = x0.matrix();
    let eh = e.adjoint();
    let a = alpha.a().map(|m| eh.matmul(m).matmul(e));
    let b = alpha.b().map(|m| eh.matmul(m));
    let c = alpha.c().map(|m| m.matmul(e));
    Colligation::new(a, b, c, alpha.d().clone())
}

/// Uniform minimal reduction: removes the largest jointly invariant
/// C-annihilated subspace D and the largest jointly co-invariant
/// B*-annihilated subspace D* orthogonal to it, then compresses onto the
/// remainder. One pass reaches a fixpoint; the result dilates back to alpha.
pub fn reduce_uniform(
    alpha: &Colligation,
    degree_cap: usize,
    tol: f64,
) -> Result<(Colligation, SubspaceBasis, SubspaceBasis)> {
    let dx = alpha.dim_state();
    // observability span: words in A_k^H applied to ranges of C_k^H
    let mut obs_seed = CMatrix::zeros(dx, 0);
    for k in 0..alpha.n() {
        obs_seed = CMatrix::hconcat(&obs_seed, &alpha.c().mat(k).adjoint());
    }
    let a_adj: Vec<CMatrix> = alpha.a().mats().iter().map(|m| m.adjoint()).collect();
    let a_adj_refs: Vec<&CMatrix> = a_adj.iter().collect();
    let obs = SubspaceBasis::span(&krylov_span(&a_adj_refs, &obs_seed));
    let defect = obs.complement();

    // reachability-with-defect span: words in A_k applied to ran B_k and D
    let mut reach_seed = defect.matrix().clone();
    for k in 0..alpha.n() {
        reach_seed = CMatrix::hconcat(&reach_seed, alpha.b().mat(k));
    }
    let a_refs: Vec<&CMatrix> = alpha.a().mats().iter().collect();
    let reach = krylov_span(&a_refs, &reach_seed);
    let dstar = SubspaceBasis::span(&reach).complement();

    // X_min = reach minus defect: orthonormalize [defect | reach], keep the tail
    let combined = CMatrix::hconcat(defect.matrix(), &reach).column_span_basis(RANK_TOL);
    let x_min = SubspaceBasis::new(combined.block(
        0,
        defect.dim(),
        dx,
        combined.cols() - defect.dim(),
    ))?;
    let reduced = compress(alpha, &x_min)?;
    let report = is_dilation(alpha, &reduced, &x_min, degree_cap, tol)?;
    debug_assert!(report.pass, "reduction must yield a dilation: {report:?}");
    let _ = report;
    Ok((reduced, defect, dstar))
}
