//! Symmetrized multipowers of operator tuples, plain or bordered.
//!
//! For a multi-index s, the plain symmetrized multipower A^s averages the
//! products A_{k_1} ... A_{k_|s|} over all arrangements of the multiset that
//! holds each type k exactly s_k times; the bordered variants replace the
//! last letter by B (SharpB), the first by C (FlatC), or both (FlatSharp).
//! Averaging divides by the multinomial count c_s = |s|! / (s_1! ... s_N!).
//!
//! `sym_power` evaluates the recursion W(s) = sum_{k: s_k > 0} X_k W(s - e_k)
//! on unnormalized word sums (cost O(prod (s_k + 1)) matrix products with
//! memoization); `sym_power_oracle` enumerates every arrangement literally
//! and is kept as an independent cross-check.

use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix};
use crate::tuple::{MultiIndex, OperatorTuple};
use std::collections::HashMap;

/// Which word shape a symmetrized multipower takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymPowerKind {
    /// A^s, any s (s = 0 gives the identity).
    Plain,
    /// (A#B)^s: words ending in a B letter; |s| >= 1.
    SharpB,
    /// (CbA)^s: words starting with a C letter; |s| >= 1.
    FlatC,
    /// (CbA#B)^s: C first, B last; |s| >= 2.
    FlatSharp,
}

/// The multinomial coefficient |s|! / (s_1! ... s_N!), exactly, in u64.
pub fn polynomial_coefficient(s: &MultiIndex) -> Result<u64> {
    let mut total: u64 = 0;
    let mut coeff: u64 = 1;
    for &sk in s.components() {
        for j in 1..=sk as u64 {
            total = total
                .checked_add(1)
                .ok_or_else(|| Error::CapacityExceeded("multi-index degree".into()))?;
            // coeff *= total / j, kept integral by multiplying before dividing
            coeff = coeff
                .checked_mul(total)
                .ok_or_else(|| Error::CapacityExceeded(format!(
                    "multinomial coefficient for {:?} exceeds u64",
                    s.components()
                )))?
                / j;
        }
    }
    Ok(coeff)
}

struct Operands<'a> {
    a: &'a OperatorTuple,
    b: Option<&'a OperatorTuple>,
    c: Option<&'a OperatorTuple>,
}

impl<'a> Operands<'a> {
    fn b(&self) -> Result<&'a OperatorTuple> {
        self.b.ok_or_else(|| Error::ShapeMismatch("this kind needs a B tuple".into()))
    }

    fn c(&self) -> Result<&'a OperatorTuple> {
        self.c.ok_or_else(|| Error::ShapeMismatch("this kind needs a C tuple".into()))
    }
}

fn check_domain(kind: SymPowerKind, s: &MultiIndex) -> Result<()> {
    let ok = match kind {
        SymPowerKind::Plain => true,
        SymPowerKind::SharpB | SymPowerKind::FlatC => s.degree() >= 1,
        SymPowerKind::FlatSharp => s.degree() >= 2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DomainViolation(format!(
            "{kind:?} is undefined at multi-index {:?}",
            s.components()
        )))
    }
}

fn check_shapes(kind: SymPowerKind, ops: &Operands) -> Result<()> {
    let a = ops.a;
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch("A tuple must be square".into()));
    }
    match kind {
        SymPowerKind::Plain => {}
        SymPowerKind::SharpB => {
            if ops.b()?.rows() != a.rows() {
                return Err(Error::ShapeMismatch("B tuple must map into A's space".into()));
            }
        }
        SymPowerKind::FlatC => {
            if ops.c()?.cols() != a.rows() {
                return Err(Error::ShapeMismatch("C tuple must act on A's space".into()));
            }
        }
        SymPowerKind::FlatSharp => {
            if ops.b()?.rows() != a.rows() || ops.c()?.cols() != a.rows() {
                return Err(Error::ShapeMismatch("B and C tuples must border A's space".into()));
            }
        }
    }
    Ok(())
}

/// Unnormalized plain word sum W(s) = sum over arrangements of A-words,
/// memoized over the sublattice t <= s.
fn word_sum_plain<'a>(
    a: &OperatorTuple,
    s: &MultiIndex,
    memo: &'a mut HashMap<MultiIndex, CMatrix>,
) -> CMatrix {
    if let Some(hit) = memo.get(s) {
        return hit.clone();
    }
    let value = if s.is_zero() {
        CMatrix::identity(a.rows())
    } else {
        let mut acc = CMatrix::zeros(a.rows(), a.cols());
        for k in 0..s.n() {
            if let Some(prev) = s.step_down(k) {
                let tail = word_sum_plain(a, &prev, memo);
                acc = acc.add(&a.mat(k).matmul(&tail));
            }
        }
        acc
    };
    memo.insert(s.clone(), value.clone());
    value
}

/// Unnormalized A#B word sum: length-1 words are the bare B_k.
fn word_sum_sharp_b(
    a: &OperatorTuple,
    b: &OperatorTuple,
    s: &MultiIndex,
    memo: &mut HashMap<MultiIndex, CMatrix>,
) -> CMatrix {
    if let Some(hit) = memo.get(s) {
        return hit.clone();
    }
    let value = if s.degree() == 1 {
        let k = (0..s.n()).find(|&k| s.component(k) == 1).unwrap();
        b.mat(k).clone()
    } else {
        let mut acc = CMatrix::zeros(b.rows(), b.cols());
        for k in 0..s.n() {
            if let Some(prev) = s.step_down(k) {
                let tail = word_sum_sharp_b(a, b, &prev, memo);
                acc = acc.add(&a.mat(k).matmul(&tail));
            }
        }
        acc
    };
    memo.insert(s.clone(), value.clone());
    value
}

/// Symmetrized multipower, normalized by the multinomial coefficient.
pub fn sym_power(
    kind: SymPowerKind,
    a: &OperatorTuple,
    b: Option<&OperatorTuple>,
    c: Option<&OperatorTuple>,
    s: &MultiIndex,
) -> Result<CMatrix> {
    if s.n() != a.n() {
        return Err(Error::ShapeMismatch("multi-index length must match tuple size".into()));
    }
    check_domain(kind, s)?;
    let ops = Operands { a, b, c };
    check_shapes(kind, &ops)?;
    let cs = polynomial_coefficient(s)? as f64;
    let inv = C64::new(1.0 / cs, 0.0);
    let mut memo = HashMap::new();
    let unnormalized = match kind {
        SymPowerKind::Plain => word_sum_plain(a, s, &mut memo),
        SymPowerKind::SharpB => word_sum_sharp_b(a, ops.b()?, s, &mut memo),
        SymPowerKind::FlatC => {
            // peel the leading C letter: V(s) = sum_k C_k W_A(s - e_k)
            let c = ops.c()?;
            let mut acc = CMatrix::zeros(c.rows(), a.cols());
            for k in 0..s.n() {
                if let Some(prev) = s.step_down(k) {
                    let tail = word_sum_plain(a, &prev, &mut memo);
                    acc = acc.add(&c.mat(k).matmul(&tail));
                }
            }
            acc
        }
        SymPowerKind::FlatSharp => {
            let c = ops.c()?;
            let bm = ops.b()?;
            let mut acc = CMatrix::zeros(c.rows(), bm.cols());
            for k in 0..s.n() {
                if let Some(prev) = s.step_down(k) {
                    let tail = word_sum_sharp_b(a, bm, &prev, &mut memo);
                    acc = acc.add(&c.mat(k).matmul(&tail));
                }
            }
            acc
        }
    };
    Ok(unnormalized.scale(inv))
}

/// Literal enumeration over every arrangement, guarded at |s| <= 8.
pub fn sym_power_oracle(
    kind: SymPowerKind,
    a: &OperatorTuple,
    b: Option<&OperatorTuple>,
    c: Option<&OperatorTuple>,
    s: &MultiIndex,
) -> Result<CMatrix> {
    if s.n() != a.n() {
        return Err(Error::ShapeMismatch("multi-index length must match tuple size".into()));
    }
    if s.degree() > 8 {
        return Err(Error::CapacityExceeded(format!(
            "oracle enumeration limited to degree 8, got {}",
            s.degree()
        )));
    }
    check_domain(kind, s)?;
    let ops = Operands { a, b, c };
    check_shapes(kind, &ops)?;

    let arrangements = enumerate_arrangements(s);
    let (rows, cols) = match kind {
        SymPowerKind::Plain => (a.rows(), a.cols()),
        SymPowerKind::SharpB => (ops.b()?.rows(), ops.b()?.cols()),
        SymPowerKind::FlatC => (ops.c()?.rows(), a.cols()),
        SymPowerKind::FlatSharp => (ops.c()?.rows(), ops.b()?.cols()),
    };
    let mut acc = CMatrix::zeros(rows, cols);
    for word in &arrangements {
        let len = word.len();
        let mut product: Option<CMatrix> = None;
        for (pos, &k) in word.iter().enumerate() {
            let first = pos == 0;
            let last = pos + 1 == len;
            let letter = match kind {
                SymPowerKind::Plain => a.mat(k),
                SymPowerKind::SharpB => {
                    if last {
                        ops.b()?.mat(k)
                    } else {
                        a.mat(k)
                    }
                }
                SymPowerKind::FlatC => {
                    if first {
                        ops.c()?.mat(k)
                    } else {
                        a.mat(k)
                    }
                }
                SymPowerKind::FlatSharp => {
                    if first {
                        ops.c()?.mat(k)
                    } else if last {
                        ops.b()?.mat(k)
                    } else {
                        a.mat(k)
                    }
                }
            };
            product = Some(match product {
                None => letter.clone(),
                Some(p) => p.matmul(letter),
            });
        }
        let term = product.unwrap_or_else(|| CMatrix::identity(a.rows()));
        acc = acc.add(&term);
    }
    let cs = arrangements.len() as f64;
    Ok(acc.scale(C64::new(1.0 / cs, 0.0)))
}

/// Every distinct arrangement of the multiset {k repeated s_k times}.
fn enumerate_arrangements(s: &MultiIndex) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut remaining = s.components().to_vec();
    let mut word = Vec::with_capacity(s.degree());
    fn recurse(remaining: &mut [usize], word: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.iter().all(|&r| r == 0) {
            out.push(word.clone());
            return;
        }
        for k in 0..remaining.len() {
            if remaining[k] == 0 {
                continue;
            }
            remaining[k] -= 1;
            word.push(k);
            recurse(remaining, word, out);
            word.pop();
            remaining[k] += 1;
        }
    }
    recurse(&mut remaining, &mut word, &mut out);
    out
}
