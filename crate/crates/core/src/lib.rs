//! q-series and eta-quotient toolkit for congruences of three-colored
//! Frobenius partitions modulo powers of 5.

pub mod error;
pub mod eta;
pub mod number_theory;
pub mod operators;
pub mod partitions;
pub mod series;
pub mod verification;

pub use error::{Error, Result};
