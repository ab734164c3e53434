//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state vector is not normalized: |norm - 1| = {0:e}")]
    NotNormalized(f64),

    #[error("not a valid density operator: {0}")]
    InvalidDensity(String),

    #[error("Kraus completeness violated: max |sum E^dag E - I| = {0:e}")]
    InvalidChannel(f64),

    #[error("map operator is singular: |det T| = {0:e}")]
    SingularMap(f64),

    #[error("state is annihilated by the map (denominator {0:e}); map undefined here")]
    DegenerateState(f64),

    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),

    #[error("framework violation: {0}")]
    FrameworkViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
