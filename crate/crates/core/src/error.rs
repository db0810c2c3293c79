use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("second-stage action infeasible: {constraint} violated by {residual:.3e}")]
    Infeasible { constraint: String, residual: f64 },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("{what} did not converge after {iterations} iterations (gap {gap:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        gap: f64,
    },

    #[error("fluid program infeasible: constraint {constraint} needs slack {slack:.3e}")]
    FluidInfeasible { constraint: usize, slack: f64 },

    #[error("unsupported distance between {0}")]
    UnsupportedMetric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    /// Whether the error stems from invalid user input rather than a failed
    /// computation or I/O.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse { .. })
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
