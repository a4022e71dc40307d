//! Casimir-Polder interaction of a two-level molecule with a non-dispersive dielectric
//! half-space whose temperature may differ from that of the surrounding radiation.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod golden;
pub mod kernels;
pub mod model;
pub mod potential;
pub mod quadrature;
pub mod solvers;

pub use error::{Error, Result};
