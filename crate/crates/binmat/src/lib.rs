//! Complete binary matroids over GF(2)^d: bit-packed linear algebra,
//! partition-matroid reductions and their certification, structural bounds
//! on valid reductions, covering numbers with explicit covers, and a
//! reproducible Monte Carlo harness for secretary-style experiments with
//! adversarial indicator weights.

mod error;
pub mod gf2;
pub mod matroid;
pub mod reduction;
pub mod secretary;
pub mod structure;

pub use error::{Error, Result};
