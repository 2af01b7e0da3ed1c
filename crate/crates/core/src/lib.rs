//! Multiparameter linear stationary dynamical systems over the polydisc:
//! linear pencils on the torus, dissipative and conservative scattering
//! systems, dilation verification and construction, approximate conservative
//! realizations, von Neumann violation search, and lattice-time simulation.

pub mod colligation;
pub mod dilation;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod multipower;
pub mod pencil;
pub mod realize;
pub mod transfer;
pub mod tuple;
pub mod vneumann;

pub use colligation::Colligation;
pub use error::{Error, Result};
pub use matrix::{C64, CMatrix};
pub use tuple::{MultiIndex, OperatorTuple, TorusPoint};
