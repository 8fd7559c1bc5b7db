use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{requested} atoms exceeds the configured capacity of {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cumulative trace drift {drift:.3e} exceeded the limit at t = {t}; reduce dt")]
    TraceDrift { drift: f64, t: f64 },

    #[error("feature extraction failed: {0}")]
    FeatureExtraction(String),

    #[error("Fock truncation leaks {tail:.3e} of the population beyond the cutoff")]
    CutoffLeak { tail: f64 },

    #[error("sweep value {value} failed: {source}")]
    SweepRun {
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
