use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("component index {index} out of range for a composition of {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("state bound {bound} exceeded after discovering {discovered} states")]
    BoundExceeded { bound: usize, discovered: usize },

    #[error("bound must be at least 1")]
    ZeroBound,

    #[error("malformed action `{0}`")]
    BadAction(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("unknown location `{0}`")]
    UnknownLocation(String),

    #[error("not an isometry: {0}")]
    NotAnIsometry(String),

    #[error("{0}")]
    Usage(String),
}
