use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or experiment was configured with values that cannot work.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument lies outside the domain of the operation (e.g. θ = ±π/2).
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller broke a documented precondition (length mismatch, overlapping bins, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numerical procedure failed to reach its tolerance.
    #[error("numeric failure: {message} (residual {residual:.3e})")]
    Numeric { message: String, residual: f64 },

    /// Points of a correlation kernel are too close for the covariance to be invertible.
    #[error("degenerate point configuration: {0}")]
    Degenerate(String),

    #[error("missing input file {0}")]
    MissingInput(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn numeric(message: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            message: message.into(),
            residual,
        }
    }
}
