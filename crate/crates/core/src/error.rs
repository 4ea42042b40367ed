use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported dimension {0}: only n = 3 is supported for Euclidean quadrature")]
    UnsupportedDimension(usize),

    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("eigen solver failed: {0}")]
    SolverFailure(String),

    #[error("evaluation at the pole (origin)")]
    Pole,

    #[error("point lies on the characteristic axis x = y = 0")]
    CharacteristicAxis,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
