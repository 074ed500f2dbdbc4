//! Rank-one Jacobi analysis.
//!
//! Jacobi functions `φ_λ^{(α,β)}` evaluated by several cross-checking methods,
//! the Jacobi transform pair, hypergroup convolution, multiplier kernels,
//! Riesz potentials and parameter adapters for the classical geometries.

pub mod dd;
pub mod error;
pub mod quadrature;
pub mod special;
pub mod jacobi;
pub mod asymptotic;
pub mod grid;
pub mod transform;
pub mod hypergroup;
pub mod operators;
pub mod geometry;

pub use error::{JacobiError, Result};
pub use num_complex::Complex64;
