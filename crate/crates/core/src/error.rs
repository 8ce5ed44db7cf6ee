//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero rational function")]
    DivisionByZero,

    #[error("rational function has a pole at q = 1")]
    PoleAtOne,

    #[error("dimension parameter must be at least 3, got {0}")]
    InvalidDimension(usize),

    #[error("spectral decomposition failed: {0}")]
    SpectralError(String),

    #[error("degree {needed} exceeds the reduction table bound {bound}")]
    DegreeExceeded { needed: usize, bound: usize },

    #[error("coefficient extraction is underdetermined: {0}")]
    IncompleteBasis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
