use thiserror::Error;

/// Errors produced by the arithmetic, analytic and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the documented domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The requested point is a pole of the function being evaluated.
    #[error("{op} has a pole at {at}")]
    Pole { op: &'static str, at: String },

    /// A numerical procedure could not certify the requested tolerance.
    #[error("{op}: tolerance {requested:e} not met (achieved estimate {achieved:e})")]
    ToleranceNotMet {
        op: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// A result would not fit in the integer type used to hold it.
    #[error("{op}: result overflows 64-bit range")]
    Overflow { op: &'static str },

    /// A request or configuration is malformed.
    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn pole(op: &'static str, at: impl std::fmt::Display) -> Self {
        Error::Pole {
            op,
            at: at.to_string(),
        }
    }
}
