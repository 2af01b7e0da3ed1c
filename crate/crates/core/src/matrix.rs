//! Dense complex matrices and the numerical kernels the rest of the crate
//! is built on: one-sided Jacobi SVD, LU solves, modified Gram-Schmidt.
//!
//! Matrices are row-major, immutable in spirit (all operations return new
//! values), and dimension-0 edges are first-class: a 0xk or kx0 matrix is a
//! valid operator between trivial spaces and multiplies like one.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;

pub type C64 = Complex64;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows, validating shape and finiteness.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch(format!(
                    "ragged rows: expected {} columns, found {}",
                    c,
                    row.len()
                )));
            }
            for &z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(format!("entry {z}")));
                }
                data.push(z);
            }
        }
        Ok(CMatrix { rows: r, cols: c, data })
    }

    /// Real input convenience, mostly for tests and fixtures.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn scalar(z: C64) -> Self {
        let mut m = Self::zeros(1, 1);
        m[(0, 0)] = z;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "add: shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "sub: shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, z: C64) -> Self {
        let data = self.data.iter().map(|a| a * z).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: inner dimensions {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec: dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Extracts the block starting at (r0, c0) with the given size.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Assembles a 2x2 block matrix [[a, b], [c, d]]. Dimension-0 blocks are fine.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows, "block2x2 top row heights");
        assert_eq!(c.rows, d.rows, "block2x2 bottom row heights");
        assert_eq!(a.cols, c.cols, "block2x2 left column widths");
        assert_eq!(b.cols, d.cols, "block2x2 right column widths");
        let mut out = Self::zeros(a.rows + c.rows, a.cols + b.cols);
        out.paste(0, 0, a);
        out.paste(0, a.cols, b);
        out.paste(a.rows, 0, c);
        out.paste(a.rows, a.cols, d);
        out
    }

    pub fn hconcat(a: &Self, b: &Self) -> Self {
        assert_eq!(a.rows, b.rows, "hconcat row counts");
        let mut out = Self::zeros(a.rows, a.cols + b.cols);
        out.paste(0, 0, a);
        out.paste(0, a.cols, b);
        out
    }

    pub fn vconcat(a: &Self, b: &Self) -> Self {
        assert_eq!(a.cols, b.cols, "vconcat column counts");
        let mut out = Self::zeros(a.rows + b.rows, a.cols);
        out.paste(0, 0, a);
        out.paste(a.rows, 0, b);
        out
    }

    fn paste(&mut self, r0: usize, c0: usize, src: &Self) {
        for i in 0..src.rows {
            for j in 0..src.cols {
                self[(r0 + i, c0 + j)] = src[(i, j)];
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<C64>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value. Empty matrices have norm 0.
    pub fn spectral_norm(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// All singular values, descending, via one-sided Jacobi.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        let work = if self.rows >= self.cols { self.clone() } else { self.adjoint() };
        let (rotated, _v) = jacobi_rotate_columns(work, false);
        let mut sigma: Vec<f64> = (0..rotated.cols)
            .map(|j| (0..rotated.rows).map(|i| rotated[(i, j)].norm_sqr()).sum::<f64>().sqrt())
            .collect();
        sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sigma
    }

    /// Full thin SVD: returns (u, sigma, v) with `self = u * diag(sigma) * v^H`,
    /// u of shape m x k, v of shape n x k, k = min(m, n), sigma descending.
    pub fn svd(&self) -> (CMatrix, Vec<f64>, CMatrix) {
        let transposed = self.rows < self.cols;
        let work = if transposed { self.adjoint() } else { self.clone() };
        let (rotated, v) = jacobi_rotate_columns(work, true);
        let v = v.expect("requested V accumulation");
        let k = rotated.cols;
        let mut order: Vec<usize> = (0..k).collect();
        let norms: Vec<f64> = (0..k)
            .map(|j| (0..rotated.rows).map(|i| rotated[(i, j)].norm_sqr()).sum::<f64>().sqrt())
            .collect();
        order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
        let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
        let scale = sigma.first().copied().unwrap_or(0.0);
        // U columns: normalized rotated columns; rank-deficient columns are
        // completed to an orthonormal set against the ones already taken.
        let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(k);
        for (rank, &j) in order.iter().enumerate() {
            if sigma[rank] > scale * 1e-300 && sigma[rank] > 0.0 {
                let col: Vec<C64> =
                    (0..rotated.rows).map(|i| rotated[(i, j)] / sigma[rank]).collect();
                u_cols.push(col);
            } else {
                u_cols.push(complete_direction(rotated.rows, &u_cols));
            }
        }
        let u = CMatrix::from_columns(rotated.rows, &u_cols);
        let v_perm = CMatrix::from_fn(v.rows, k, |i, j| v[(i, order[j])]);
        if transposed {
            (v_perm, sigma, u)
        } else {
            (u, sigma, v_perm)
        }
    }

    /// max(||m^H m - I||, ||m m^H - I||) in spectral norm; 0 for unitary input.
    pub fn unitarity_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "unitarity defect needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.rows == 0 {
            return Ok(0.0);
        }
        let eye = Self::identity(self.rows);
        let left = self.adjoint().matmul(self).sub(&eye).spectral_norm();
        let right = self.matmul(&self.adjoint()).sub(&eye).spectral_norm();
        Ok(left.max(right))
    }

    /// Kronecker product; index law `kron(a,b)[(i1*b.rows+i2, j1*b.cols+j2)] = a[i1,j1] b[i2,j2]`.
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        let rows = a
            .rows
            .checked_mul(b.rows)
            .ok_or_else(|| Error::CapacityExceeded("kron row count overflows".into()))?;
        let cols = a
            .cols
            .checked_mul(b.cols)
            .ok_or_else(|| Error::CapacityExceeded("kron column count overflows".into()))?;
        rows.checked_mul(cols)
            .filter(|&len| len <= (1usize << 28))
            .ok_or_else(|| Error::CapacityExceeded("kron result too large".into()))?;
        let mut out = Self::zeros(rows, cols);
        for i1 in 0..a.rows {
            for j1 in 0..a.cols {
                let z = a[(i1, j1)];
                if z.re == 0.0 && z.im == 0.0 {
                    continue;
                }
                for i2 in 0..b.rows {
                    for j2 in 0..b.cols {
                        out[(i1 * b.rows + i2, j1 * b.cols + j2)] = z * b[(i2, j2)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Solves `self * x = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("solve needs a square matrix".into()));
        }
        if self.rows != rhs.rows {
            return Err(Error::ShapeMismatch("solve: rhs row count".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, rhs.cols));
        }
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = self.max_abs().max(1e-300);
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            if pivot_abs < scale * 1e-280 {
                return Err(Error::NearSingular { cond: f64::INFINITY });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(pivot_row * n + j, col * n + j);
                }
                for j in 0..b.cols {
                    b.data.swap(pivot_row * b.cols + j, col * b.cols + j);
                }
            }
            let pivot = a[(col, col)];
            for r in (col + 1)..n {
                let factor = a[(r, col)] / pivot;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= factor * v;
                }
                for j in 0..b.cols {
                    let v = b[(col, j)];
                    b[(r, j)] -= factor * v;
                }
            }
        }
        // back substitution
        let mut x = Self::zeros(n, rhs.cols);
        for j in 0..rhs.cols {
            for i in (0..n).rev() {
                let mut acc = b[(i, j)];
                for k in (i + 1)..n {
                    acc -= a[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = acc / a[(i, i)];
            }
        }
        Ok(x)
    }

    /// Condition number estimate sigma_max / sigma_min (infinite if singular).
    pub fn condition_estimate(&self) -> f64 {
        let sv = self.singular_values();
        match (sv.first(), sv.last()) {
            (Some(&max), Some(&min)) if min > 0.0 => max / min,
            (Some(&max), _) if max == 0.0 => 1.0,
            (Some(_), _) => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// Orthonormal basis for the column span (modified Gram-Schmidt with one
    /// reorthogonalization pass). Rank decisions at `rel_tol` relative to the
    /// largest incoming column norm.
    pub fn column_span_basis(&self, rel_tol: f64) -> CMatrix {
        let scale = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if scale == 0.0 || self.is_empty() {
            return CMatrix::zeros(self.rows, 0);
        }
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for j in 0..self.cols {
            let mut v = self.column(j);
            // two projection passes: MGS plus one reorthogonalization
            for _ in 0..2 {
                for b in &basis {
                    let coeff: C64 =
                        b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= coeff * bi;
                    }
                }
            }
            let norm = vec_norm(&v);
            if norm > rel_tol * scale {
                for vi in v.iter_mut() {
                    *vi /= C64::new(norm, 0.0);
                }
                basis.push(v);
            }
        }
        CMatrix::from_columns(self.rows, &basis)
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Produces a unit vector orthogonal to the given orthonormal columns.
fn complete_direction(dim: usize, existing: &[Vec<C64>]) -> Vec<C64> {
    for seed in 0..dim {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[seed] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in existing {
                let coeff: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= coeff * bi;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-3 {
            for vi in v.iter_mut() {
                *vi /= C64::new(norm, 0.0);
            }
            return v;
        }
    }
    // existing columns already span; caller only asks when they cannot
    vec![C64::new(0.0, 0.0); dim]
}

/// One-sided Jacobi: rotates columns of `a` (rows >= cols) until pairwise
/// orthogonal. Returns the rotated matrix and, optionally, the accumulated
/// right factor V with `input = rotated * V^H`.
fn jacobi_rotate_columns(mut a: CMatrix, want_v: bool) -> (CMatrix, Option<CMatrix>) {
    let n = a.cols;
    let mut v = if want_v { Some(CMatrix::identity(n)) } else { None };
    if n <= 1 {
        return (a, v);
    }
    let tol = 1e-14;
    for _sweep in 0..64 {
        let mut rotated_any = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = C64::new(0.0, 0.0);
                for i in 0..a.rows {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    app += x.norm_sqr();
                    aqq += y.norm_sqr();
                    apq += x.conj() * y;
                }
                let off = apq.norm();
                if off <= tol * (app * aqq).sqrt() || off == 0.0 {
                    continue;
                }
                rotated_any = true;
                let g = apq / off;
                let tau = (aqq - app) / (2.0 * off);
                // small-magnitude root of t^2 - 2 tau t - 1 = 0
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // columns: p' = c p + s conj(g) q ; q' = -s g p + c q
                for i in 0..a.rows {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a[(i, p)] = x * c + y * g.conj() * s;
                    a[(i, q)] = x * (-s) * g + y * c;
                }
                if let Some(vm) = v.as_mut() {
                    for i in 0..n {
                        let x = vm[(i, p)];
                        let y = vm[(i, q)];
                        vm[(i, p)] = x * c + y * g.conj() * s;
                        vm[(i, q)] = x * (-s) * g + y * c;
                    }
                }
            }
        }
        if !rotated_any {
            break;
        }
    }
    (a, v)
}
