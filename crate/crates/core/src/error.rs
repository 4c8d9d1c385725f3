use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported k = {0} (supported: 2, 3, 4)")]
    UnsupportedK(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large: {states} states exceeds limit {limit}")]
    TooLarge { states: u128, limit: u128 },

    #[error("degenerate oracle: max weight equals min weight ({0})")]
    DegenerateOracle(f64),

    #[error("integration diverged at t = {time}: {reason}")]
    Divergence { time: f64, reason: String },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
