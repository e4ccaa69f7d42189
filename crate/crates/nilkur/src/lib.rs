//! Exact Dolbeault cohomology and Kuranishi deformation theory for 2-step
//! nilpotent Lie algebras carrying an abelian complex structure.
//!
//! Everything is computed over the Gaussian rationals: structure constants,
//! cohomology, harmonic bases, the Schouten bracket, Kuranishi series, and
//! deformed algebras are exact values, never floating-point approximations.
//!
//! The crate is organized bottom-up: [`exact`] provides scalars, polynomials
//! and linear algebra; [`algebra`] the input Lie algebras; [`forms`] invariant
//! differential forms; [`dolbeault`] the invariant complex; [`schouten`] the
//! bracket; [`kuranishi`] the power-series machinery; and [`deform`] the
//! high-level operations (deforming a structure, recognizing Heisenberg
//! algebras, and the full analysis report).

pub mod algebra;
pub mod deform;
pub mod dolbeault;
mod error;
pub mod exact;
pub mod forms;
pub mod kuranishi;
pub mod schouten;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
