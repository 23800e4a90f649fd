//! Local-reversibility laboratory.
//!
//! Builds exactly solvable spin Hamiltonians, computes their ground states
//! and gaps, constructs Chebyshev reverse operators and least-squares
//! optimal local reverses, and checks the associated fluctuation,
//! macroscopicity and mean-field inequalities numerically.

pub mod error;
pub mod filter;
pub mod fit;
pub mod fluctuation;
pub mod meanfield;
pub mod models;
pub mod operator;
pub mod reversibility;
pub mod runner;
pub mod spectral;

pub use error::{Error, Result};
