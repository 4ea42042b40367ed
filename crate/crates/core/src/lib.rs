//! Numerical machinery for Alt–Caffarelli–Friedman type monotonicity
//! formulas in Euclidean space and in the Heisenberg group.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod euclid_acf;
pub mod euclid_eigen;
pub mod heis_eigen;
pub mod heis_mono;
pub mod heis_polar;
pub mod heisenberg_core;
pub mod jet;
pub mod quadrature;
pub mod special;
pub mod sturm;
pub mod verify;

pub use error::{Error, Result};
