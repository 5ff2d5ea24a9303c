use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid effect: {0}")]
    InvalidEffect(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("map is not completely positive: witness eigenvalue {eigenvalue:.6e}")]
    NotCompletelyPositive { eigenvalue: f64 },
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid design input: {0}")]
    InvalidDesign(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
