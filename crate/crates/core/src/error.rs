use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario file: {0}")]
    Parse(String),

    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },

    #[error("{0}")]
    Domain(String),

    #[error("quadrature did not converge (estimated error {error_estimate:e}, tolerance {tolerance:e})")]
    NonConvergence {
        error_estimate: f64,
        tolerance: f64,
    },

    #[error("only {got} drops satisfied the conditioning event (need at least {need}); raise n_drops")]
    TooFewConditioned { got: usize, need: usize },

    #[error("policy is infeasible: {0}; project it onto the feasible set first")]
    InfeasiblePolicy(String),
}

impl Error {
    pub(crate) fn validation(key: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            key: key.to_owned(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for numeric non-convergence failures (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::TooFewConditioned { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
