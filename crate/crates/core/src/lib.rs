//! Exact symbolic engine for the quantum Euclidean spheres and their
//! covariant differential calculi.
//!
//! Everything is computed over the field of rational functions of
//! q^(1/2) with exact rational coefficients; all verification suites are
//! exact identities, never numerical approximations.

pub mod error;
pub mod scalar;
pub mod tensor;
pub mod algebra;
pub mod first_order;
pub mod higher_order;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{LaurentPoly, MultiPoly, Scalar};
