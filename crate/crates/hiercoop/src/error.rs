use thiserror::Error;

/// Errors surfaced by the simulation and bound-evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A pairwise distance fell below the far-field limit of the path-loss
    /// model (coincident or near-coincident nodes).
    #[error("near-field violation: distance {0} is below the far-field limit")]
    NearField(f64),

    #[error("operation requires the {0} regime")]
    InvalidRegime(&'static str),

    #[error("numeric error: {0}")]
    NumericError(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericError(msg.into())
    }
}
