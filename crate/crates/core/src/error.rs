use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown setting id {0}")]
    UnknownSetting(usize),

    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),

    #[error("unsupported benchmark combination: {0}")]
    Unsupported(String),

    #[error("training session for this setting already reached t_max = {0}")]
    SessionExhausted(usize),

    #[error("setting {0:?} is not listed in the tabular problem")]
    UnlistedSetting(Vec<f64>),

    #[error("failed to load tabular problem from {path}: {reason}")]
    TabularLoad { path: PathBuf, reason: String },

    #[error("covariance factorization failed after the full jitter ladder")]
    Factorization,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Harness(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
