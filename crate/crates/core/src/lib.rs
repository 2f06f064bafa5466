//! Lie quasi-states on the symplectic Lie algebra sp(2n, ℝ).
//!
//! The crate computes the Maslov quasi-state by following the unitary polar
//! factor of `e^{tB}` and, independently, from a Williamson normal form. It
//! also builds linear, two-dimensional, discontinuous and composite
//! quasi-states and provides randomized checkers for their structural
//! properties.

pub mod analysis;
pub mod cli;
pub mod error;
mod linalg;
pub mod maslov;
pub mod quasistates;
pub mod symplectic;
pub mod verify;
pub mod williamson;

pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};
pub use nalgebra::Complex;
