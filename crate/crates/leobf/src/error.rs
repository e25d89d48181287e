//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by scenario construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid orbital elements: {0}")]
    InvalidElements(String),

    #[error("invalid array geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("invalid arrival direction: {0}")]
    InvalidDirection(String),

    #[error("invalid link budget: {0}")]
    InvalidBudget(String),

    #[error("invalid world state: {0}")]
    InvalidWorld(String),

    #[error("invalid REM policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("positions coincide; arrival direction undefined")]
    CoincidentPositions,

    #[error("satellite below horizon for every grid cell")]
    BelowHorizon,
}

pub type Result<T> = std::result::Result<T, Error>;
