use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operator is not Hermitian (deviation {deviation:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("unknown law id: {0}")]
    UnknownLaw(String),
    #[error("unknown constant name: {0}")]
    UnknownConstant(String),
    #[error("unknown demo: {0}")]
    UnknownDemo(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
