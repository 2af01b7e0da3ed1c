//! Colligations: the system data (N; A, B, C, D; state, input, output)
//! packaged as four operator tuples with consistent dimensions.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::tuple::OperatorTuple;

/// A system alpha = (N; A, B, C, D; dX, dIn, dOut).
///
/// Shapes: A_k is dX x dX, B_k is dX x dIn, C_k is dOut x dX, D_k is dOut x dIn.
/// The stacked block [[A_k, B_k], [C_k, D_k]] maps state+input to state+output.
#[derive(Clone, Debug, PartialEq)]
pub struct Colligation {
    a: OperatorTuple,
    b: OperatorTuple,
    c: OperatorTuple,
    d: OperatorTuple,
    dim_state: usize,
    dim_in: usize,
    dim_out: usize,
}

impl Colligation {
    pub fn new(
        a: OperatorTuple,
        b: OperatorTuple,
        c: OperatorTuple,
        d: OperatorTuple,
    ) -> Result<Self> {
        let n = a.n();
        if b.n() != n || c.n() != n || d.n() != n {
            return Err(Error::ShapeMismatch("tuples disagree on parameter count".into()));
        }
        let dim_state = a.rows();
        let dim_in = b.cols();
        let dim_out = c.rows();
        let checks = [
            (a.rows() == dim_state && a.cols() == dim_state, "A must be dX x dX"),
            (b.rows() == dim_state, "B must be dX x dIn"),
            (c.cols() == dim_state, "C must be dOut x dX"),
            (d.rows() == dim_out && d.cols() == dim_in, "D must be dOut x dIn"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::ShapeMismatch(msg.into()));
            }
        }
        Ok(Colligation { a, b, c, d, dim_state, dim_in, dim_out })
    }

    /// Splits a tuple of stacked blocks [[A,B],[C,D]] into a colligation.
    pub fn from_stacked(g: &OperatorTuple, dim_state: usize) -> Result<Self> {
        if g.rows() < dim_state || g.cols() < dim_state {
            return Err(Error::ShapeMismatch(format!(
                "stacked blocks {}x{} cannot carry a state of dimension {}",
                g.rows(),
                g.cols(),
                dim_state
            )));
        }
        let dim_in = g.cols() - dim_state;
        let dim_out = g.rows() - dim_state;
        let take = |f: &dyn Fn(&CMatrix) -> CMatrix| -> Result<OperatorTuple> {
            OperatorTuple::new(g.mats().iter().map(|m| f(m)).collect())
        };
        let a = take(&|m| m.block(0, 0, dim_state, dim_state))?;
        let b = take(&|m| m.block(0, dim_state, dim_state, dim_in))?;
        let c = take(&|m| m.block(dim_state, 0, dim_out, dim_state))?;
        let d = take(&|m| m.block(dim_state, dim_state, dim_out, dim_in))?;
        Colligation::new(a, b, c, d)
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn dim_state(&self) -> usize {
        self.dim_state
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn a(&self) -> &OperatorTuple {
        &self.a
    }

    pub fn b(&self) -> &OperatorTuple {
        &self.b
    }

    pub fn c(&self) -> &OperatorTuple {
        &self.c
    }

    pub fn d(&self) -> &OperatorTuple {
        &self.d
    }

    /// The k-th stacked block [[A_k, B_k], [C_k, D_k]] (0-based k).
    pub fn stack(&self, k: usize) -> Result<CMatrix> {
        if k >= self.n() {
            return Err(Error::IndexOutOfRange(format!(
                "block index {} out of range for N = {}",
                k,
                self.n()
            )));
        }
        Ok(CMatrix::block2x2(self.a.mat(k), self.b.mat(k), self.c.mat(k), self.d.mat(k)))
    }

    /// All stacked blocks as an operator tuple (the pencil coefficients G_k).
    pub fn stacked(&self) -> OperatorTuple {
        OperatorTuple::new((0..self.n()).map(|k| self.stack(k).unwrap()).collect())
            .expect("stacked blocks share one shape")
    }

    /// Exact equality of the D tuples, entry by entry.
    pub fn d_equals(&self, other: &Colligation) -> bool {
        self.d == other.d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    #[test]
    fn stack_places_blocks() {
        let a = OperatorTuple::new(vec![CMatrix::from_real(&[&[0.0]])]).unwrap();
        let b = OperatorTuple::new(vec![CMatrix::from_real(&[&[1.0]])]).unwrap();
        let c = OperatorTuple::new(vec![CMatrix::from_real(&[&[1.0]])]).unwrap();
        let d = OperatorTuple::new(vec![CMatrix::from_real(&[&[0.0]])]).unwrap();
        let alpha = Colligation::new(a, b, c, d).unwrap();
        let g = alpha.stack(0).unwrap();
        assert_eq!(g, CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(alpha.stack(1).is_err());
    }

    #[test]
    fn degenerate_io_stack_is_a() {
        let a = OperatorTuple::new(vec![CMatrix::identity(2)]).unwrap();
        let b = OperatorTuple::new(vec![CMatrix::zeros(2, 0)]).unwrap();
        let c = OperatorTuple::new(vec![CMatrix::zeros(0, 2)]).unwrap();
        let d = OperatorTuple::new(vec![CMatrix::zeros(0, 0)]).unwrap();
        let alpha = Colligation::new(a, b, c, d).unwrap();
        assert_eq!(alpha.stack(0).unwrap(), CMatrix::identity(2));
    }

    #[test]
    fn stack_unstack_round_trip() {
        let mk = |vals: &[[f64; 3]; 3]| {
            CMatrix::from_fn(3, 3, |i, j| C64::new(vals[i][j], vals[j][i] * 0.5))
        };
        let g = OperatorTuple::new(vec![
            mk(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]),
            mk(&[[0.1, 0.2, 0.3], [0.4, 0.5, 0.6], [0.7, 0.8, 0.9]]),
        ])
        .unwrap();
        let alpha = Colligation::from_stacked(&g, 2).unwrap();
        assert_eq!(alpha.dim_state(), 2);
        assert_eq!(alpha.dim_in(), 1);
        assert_eq!(alpha.dim_out(), 1);
        assert_eq!(alpha.stacked(), g);
    }
}
