use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested operating point cannot be reached.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A search did not find what it was looking for in its window.
    #[error("not found: {0}")]
    NotFound(String),

    /// Invalid construction input (non-primitive polynomial, rank deficient matrix, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Least-squares fit could not be computed.
    #[error("fit error: {0}")]
    Fit(String),

    /// Malformed text input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
