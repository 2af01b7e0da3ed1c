//! Shared domain types: operator tuples, torus points, multi-indices.

use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};

/// N same-shaped matrices, the coefficient carrier of a linear pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    mats: Vec<CMatrix>,
}

impl OperatorTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::ShapeMismatch("operator tuple needs at least one matrix".into()));
        }
        let (r, c) = (mats[0].rows(), mats[0].cols());
        for (k, m) in mats.iter().enumerate() {
            if m.rows() != r || m.cols() != c {
                return Err(Error::ShapeMismatch(format!(
                    "tuple entry {} has shape {}x{}, expected {}x{}",
                    k,
                    m.rows(),
                    m.cols(),
                    r,
                    c
                )));
            }
            if !m.all_finite() {
                return Err(Error::NonFinite(format!("tuple entry {k}")));
            }
        }
        Ok(OperatorTuple { mats })
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn rows(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.mats[0].cols()
    }

    pub fn mat(&self, k: usize) -> &CMatrix {
        &self.mats[k]
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn map(&self, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        OperatorTuple { mats: self.mats.iter().map(|m| f(m)).collect() }
    }

    pub fn scale(&self, z: C64) -> Self {
        self.map(|m| m.scale(z))
    }

    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        OperatorTuple { mats: vec![CMatrix::zeros(rows, cols); n] }
    }
}

/// A point of the N-torus: unimodular coordinates within 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<C64>,
}

impl TorusPoint {
    pub const UNIMODULAR_TOL: f64 = 1e-12;

    pub fn new(coords: Vec<C64>) -> Result<Self> {
        for (k, z) in coords.iter().enumerate() {
            if (z.norm() - 1.0).abs() > Self::UNIMODULAR_TOL {
                return Err(Error::DomainViolation(format!(
                    "coordinate {} has modulus {}, not on the torus",
                    k,
                    z.norm()
                )));
            }
        }
        Ok(TorusPoint { coords })
    }

    pub fn from_phases(phases: &[f64]) -> Self {
        TorusPoint { coords: phases.iter().map(|&t| C64::from_polar(1.0, t)).collect() }
    }

    pub fn ones(n: usize) -> Self {
        TorusPoint { coords: vec![C64::new(1.0, 0.0); n] }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn phases(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.arg()).collect()
    }
}

/// Multi-index s in Z^N_+, with |s| the component sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    s: Vec<usize>,
}

impl MultiIndex {
    pub fn new(s: Vec<usize>) -> Self {
        MultiIndex { s }
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex { s: vec![0; n] }
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut s = vec![0; n];
        s[k] = 1;
        MultiIndex { s }
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn component(&self, k: usize) -> usize {
        self.s[k]
    }

    pub fn components(&self) -> &[usize] {
        &self.s
    }

    /// |s| = sum of components.
    pub fn degree(&self) -> usize {
        self.s.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|&v| v == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.degree() == 1
    }

    /// s - e_k, if s_k > 0.
    pub fn step_down(&self, k: usize) -> Option<Self> {
        if self.s[k] == 0 {
            return None;
        }
        let mut s = self.s.clone();
        s[k] -= 1;
        Some(MultiIndex { s })
    }

    pub fn step_up(&self, k: usize) -> Self {
        let mut s = self.s.clone();
        s[k] += 1;
        MultiIndex { s }
    }

    /// All multi-indices of length n with the given degree, lexicographic.
    pub fn with_degree(n: usize, degree: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = vec![0usize; n];
        fn recurse(
            out: &mut Vec<MultiIndex>,
            current: &mut Vec<usize>,
            pos: usize,
            remaining: usize,
        ) {
            if pos + 1 == current.len() {
                current[pos] = remaining;
                out.push(MultiIndex::new(current.clone()));
                return;
            }
            for v in 0..=remaining {
                current[pos] = v;
                recurse(out, current, pos + 1, remaining - v);
            }
        }
        if n == 0 {
            if degree == 0 {
                out.push(MultiIndex::new(vec![]));
            }
            return out;
        }
        recurse(&mut out, &mut current, 0, degree);
        out
    }

    /// All multi-indices with degree in `1..=max_degree` (plus zero if asked).
    pub fn up_to_degree(n: usize, max_degree: usize, include_zero: bool) -> Vec<Self> {
        let mut out = Vec::new();
        let start = if include_zero { 0 } else { 1 };
        for d in start..=max_degree {
            out.extend(Self::with_degree(n, d));
        }
        out
    }
}
