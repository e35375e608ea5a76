use thiserror::Error;

/// Errors raised by parameter ingestion and the analytic/numeric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: missing required key `{0}`")]
    MissingKey(String),

    #[error("configuration error: unknown key `{0}`")]
    UnknownKey(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation error in `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (partial value {partial}, error estimate {abs_error_estimate:e})"
    )]
    NonConvergence {
        partial: f64,
        abs_error_estimate: f64,
        evaluations: usize,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
