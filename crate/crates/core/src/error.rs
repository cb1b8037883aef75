use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or configuration parameter is outside its domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Factorization or solve failed; `min_eigenvalue` is the estimate of the
    /// offending matrix's smallest eigenvalue when one was computed.
    #[error("numerical error: {message} (min eigenvalue estimate {min_eigenvalue:e})")]
    Numerical { message: String, min_eigenvalue: f64 },

    /// An operation was called on an input it does not accept.
    #[error("contract error: {0}")]
    Contract(String),

    #[error("invalid dataset: {0}")]
    Validation(ValidationReport),

    #[error("iteration {iteration}: {source}")]
    Chain {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, min_eigenvalue: f64) -> Self {
        Error::Numerical { message: msg.into(), min_eigenvalue }
    }

    /// True when the root cause is numerical rather than a bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical { .. } => true,
            Error::Chain { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
