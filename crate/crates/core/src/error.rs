use thiserror::Error;

/// Errors raised by the sampling, simulation and analysis engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate realization: {0}")]
    Degenerate(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing column: {0}")]
    MissingColumn(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

/// Fails with `InvalidArgument` unless `value` is finite and non-negative.
pub(crate) fn ensure_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be finite and >= 0, got {value}"))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name} must be finite and > 0, got {value}"))
    }
}
