use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not differentiable at x = {x}: left derivative {left}, right derivative {right}")]
    OneSidedDerivative { x: f64, left: f64, right: f64 },

    #[error("{context}: achieved relative error {achieved:e} exceeds requested {requested:e}")]
    Accuracy {
        context: String,
        achieved: f64,
        requested: f64,
    },

    #[error("invalid construction at x = {x}: {reason}")]
    InvalidConstruction { x: f64, reason: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("wrong case: {0}")]
    WrongCase(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
