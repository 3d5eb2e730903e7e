use std::path::PathBuf;

use crate::stable::StableParams;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{routine} did not converge: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    #[error("frontier search exhausted the grid for {key} = {value} (ratio would become nonpositive)")]
    EmptyFrontier { key: &'static str, value: f64 },

    #[error("stable fit did not converge after {iterations} iterations (last iterate {last:?})")]
    FitNotConverged { iterations: usize, last: StableParams },

    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}: malformed input: {message}")]
    Schema {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: row {row}: invalid value: {message}")]
    Validation {
        path: PathBuf,
        row: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn no_convergence(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            routine,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::EmptyFrontier { .. } | Error::FitNotConverged { .. }
        )
    }
}
