//! Multidimensional-time simulation: the recurrence
//! x(t) = sum_k (A_k x(t-e_k) + B_k u(t-e_k)),
//! y(t) = sum_k (C_k x(t-e_k) + D_k u(t-e_k))
//! driven level by level (|t| = const) on an explicitly supplied window.
//! Points whose predecessors fall outside the window are not emitted;
//! referenced-but-missing input data is a hard gap error, never zero-filled.

use crate::colligation::Colligation;
use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};
use crate::tuple::MultiIndex;
use std::collections::{BTreeMap, HashMap, HashSet};

/// Vector-valued data on a finite set of lattice points of Z^N.
#[derive(Clone, Debug, Default)]
pub struct LatticeSignal {
    n: usize,
    value_dim: usize,
    data: HashMap<Vec<i64>, Vec<C64>>,
}

impl LatticeSignal {
    pub fn new(n: usize, value_dim: usize) -> Self {
        LatticeSignal { n, value_dim, data: HashMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn insert(&mut self, point: Vec<i64>, value: Vec<C64>) -> Result<()> {
        if point.len() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "lattice point has {} coordinates, expected {}",
                point.len(),
                self.n
            )));
        }
        if value.len() != self.value_dim {
            return Err(Error::ShapeMismatch(format!(
                "value has {} entries, expected {}",
                value.len(),
                self.value_dim
            )));
        }
        if value.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!("value at {point:?}")));
        }
        self.data.insert(point, value);
        Ok(())
    }

    pub fn get(&self, point: &[i64]) -> Option<&Vec<C64>> {
        self.data.get(point)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.data.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<C64>)> {
        self.data.iter()
    }

    /// Fills the given points with zero vectors.
    pub fn zero_fill(n: usize, value_dim: usize, points: impl IntoIterator<Item = Vec<i64>>) -> Self {
        let mut s = LatticeSignal::new(n, value_dim);
        for p in points {
            s.data.insert(p, vec![C64::new(0.0, 0.0); value_dim]);
        }
        s
    }
}

fn level_of(point: &[i64]) -> i64 {
    point.iter().sum()
}

/// Runs the recurrence for `levels` steps above the initial level.
///
/// The window is implicit in the data: level 0 is exactly the domain of `x0`
/// (all on one hyperplane |t| = const), and a point is computed iff all of
/// its predecessors were computed at the previous level. Inputs must be
/// present wherever referenced (unless the input space is trivial).
/// Returns (states, outputs); states include the initial data.
pub fn simulate(
    alpha: &Colligation,
    x0: &LatticeSignal,
    input: &LatticeSignal,
    levels: usize,
) -> Result<(LatticeSignal, LatticeSignal)> {
    let n = alpha.n();
    if x0.n() != n || (alpha.dim_in() > 0 && input.n() != n) {
        return Err(Error::ShapeMismatch("signal arity must match the system".into()));
    }
    if x0.value_dim() != alpha.dim_state() {
        return Err(Error::ShapeMismatch(format!(
            "initial state dimension {} does not match the system's {}",
            x0.value_dim(),
            alpha.dim_state()
        )));
    }
    if alpha.dim_in() > 0 && input.value_dim() != alpha.dim_in() {
        return Err(Error::ShapeMismatch(format!(
            "input dimension {} does not match the system's {}",
            input.value_dim(),
            alpha.dim_in()
        )));
    }
    let base_level = match x0.points().next() {
        Some(p) => level_of(p),
        None => 0,
    };
    for p in x0.points() {
        if level_of(p) != base_level {
            return Err(Error::DomainViolation(format!(
                "initial data must sit on one level: {p:?} is off level {base_level}"
            )));
        }
    }

    let mut states = x0.clone();
    let mut outputs = LatticeSignal::new(n, alpha.dim_out());
    let mut frontier: HashSet<Vec<i64>> = x0.points().cloned().collect();
    let zero_input = vec![C64::new(0.0, 0.0); alpha.dim_in()];

    for _ in 0..levels {
        // candidates: successors of frontier points with all predecessors present
        let mut candidates: Vec<Vec<i64>> = frontier
            .iter()
            .flat_map(|p| {
                (0..n).map(move |k| {
                    let mut q = p.clone();
                    q[k] += 1;
                    q
                })
            })
            .collect::<HashSet<_>>()
            .into_iter()
            .filter(|q| {
                (0..n).all(|k| {
                    let mut pred = q.clone();
                    pred[k] -= 1;
                    frontier.contains(&pred)
                })
            })
            .collect();
        candidates.sort();

        let mut next_frontier = HashSet::with_capacity(candidates.len());
        for point in candidates {
            let mut x = vec![C64::new(0.0, 0.0); alpha.dim_state()];
            let mut y = vec![C64::new(0.0, 0.0); alpha.dim_out()];
            for k in 0..n {
                let mut pred = point.clone();
                pred[k] -= 1;
                let state_prev = states.get(&pred).expect("predecessor in frontier");
                let input_prev: &Vec<C64> = if alpha.dim_in() > 0 {
                    input
                        .get(&pred)
                        .ok_or_else(|| Error::MissingData { point: pred.clone() })?
                } else {
                    &zero_input
                };
                add_into(&mut x, &alpha.a().mat(k).matvec(state_prev));
                add_into(&mut x, &alpha.b().mat(k).matvec(input_prev));
                add_into(&mut y, &alpha.c().mat(k).matvec(state_prev));
                add_into(&mut y, &alpha.d().mat(k).matvec(input_prev));
            }
            states.insert(point.clone(), x)?;
            outputs.insert(point.clone(), y)?;
            next_frontier.insert(point);
        }
        frontier = next_frontier;
        if frontier.is_empty() {
            break;
        }
    }
    Ok((states, outputs))
}

fn add_into(acc: &mut [C64], inc: &[C64]) {
    for (a, b) in acc.iter_mut().zip(inc) {
        *a += *b;
    }
}

/// Lattice points with the given level whose coordinates lie in [-bound, bound].
fn level_points(n: usize, level: i64, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = vec![0i64; n];
    fn recurse(out: &mut Vec<Vec<i64>>, current: &mut Vec<i64>, pos: usize, rem: i64, bound: i64) {
        if pos + 1 == current.len() {
            if (-bound..=bound).contains(&rem) {
                current[pos] = rem;
                out.push(current.clone());
            }
            return;
        }
        for v in -bound..=bound {
            current[pos] = v;
            recurse(out, current, pos + 1, rem - v, bound);
        }
    }
    if n == 0 {
        return out;
    }
    recurse(&mut out, &mut current, 0, level, bound);
    out
}

/// Unit-impulse responses on the positive octant: the map from a multi-index
/// s (1 <= |s| <= max_level) to the dOut x dIn matrix whose j-th column is
/// the output at lattice point s under input impulse e_j at the origin.
///
/// The zero-level window is padded wide enough that every octant point up to
/// the requested level keeps all its predecessors inside the window.
pub fn impulse_response(
    alpha: &Colligation,
    max_level: usize,
) -> Result<BTreeMap<MultiIndex, CMatrix>> {
    if max_level < 1 {
        return Err(Error::InvalidConfig("impulse response needs at least one level".into()));
    }
    let n = alpha.n();
    let din = alpha.dim_in();
    let bound = max_level as i64;
    let x0 = LatticeSignal::zero_fill(n, alpha.dim_state(), level_points(n, 0, bound));

    let mut responses: Vec<LatticeSignal> = Vec::with_capacity(din);
    for j in 0..din {
        let mut input = LatticeSignal::new(n, din);
        for level in 0..max_level as i64 {
            for p in level_points(n, level, bound) {
                let mut v = vec![C64::new(0.0, 0.0); din];
                if p.iter().all(|&c| c == 0) {
                    v[j] = C64::new(1.0, 0.0);
                }
                input.insert(p, v)?;
            }
        }
        let (_, outputs) = simulate(alpha, &x0, &input, max_level)?;
        responses.push(outputs);
    }

    let mut map = BTreeMap::new();
    for s in MultiIndex::up_to_degree(n, max_level, false) {
        let point: Vec<i64> = s.components().iter().map(|&c| c as i64).collect();
        let mut m = CMatrix::zeros(alpha.dim_out(), din);
        for (j, outputs) in responses.iter().enumerate() {
            let col = outputs
                .get(&point)
                .ok_or_else(|| Error::MissingData { point: point.clone() })?;
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        map.insert(s, m);
    }
    Ok(map)
}
