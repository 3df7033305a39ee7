use thiserror::Error;

/// Errors raised by the actuator models, solvers and loaders.
#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of a model (bad angle, non-positive length, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or dataset field failed validation.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("unsupported material model: {0}")]
    UnsupportedModel(String),

    /// Least-squares design matrix is (numerically) rank deficient.
    #[error("rank-deficient fit: condition estimate {condition:.3e} exceeds {limit:.1e}")]
    RankDeficient { condition: f64, limit: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("simulation diverged at t = {time:.6} s (|y| = {y:.3e}, |v| = {v:.3e})")]
    Divergence { time: f64, y: f64, v: f64 },

    #[error("no -3 dB crossing in the swept range")]
    NoCrossing,

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: row {row}: {message}")]
    Row {
        path: String,
        row: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input rather than by a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Validation { .. }
                | Error::Parse { .. }
                | Error::Row { .. }
                | Error::UnsupportedModel(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
