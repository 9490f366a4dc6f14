//! Exact rational algebraic models for rational SO(3)-equivariant spectra.

pub mod burnside;
pub mod dihedral;
pub mod error;
pub mod exceptional;
pub mod fixtures;
pub mod graded;
pub mod json;
pub mod linalg;
pub mod toral;

pub use error::{Error, Result};
pub use linalg::{QMatrix, Rational};
