//! Exact scalar, polynomial, and linear-algebra kernel.
//!
//! All arithmetic is over the Gaussian rationals Q(i), represented with
//! arbitrary-precision rational components. Linear algebra uses exact
//! Gauss-Jordan elimination with deterministic pivoting, so every result
//! (ranks, kernels, complements) is reproducible bit for bit.

mod gaussian;
mod matrix;
mod poly;

pub use gaussian::{rational_from_str, rational_sqrt, GaussianRational, Rational};
pub use matrix::{
    hermitian_complement, hermitian_solve, hermitian_solve_weighted, project_onto_span,
    weighted_inner, ExactMatrix,
};
pub use poly::Poly;
