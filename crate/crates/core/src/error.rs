use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{context}: relation is not invariant under x - y + z: {witness:?} maps to {image:?}, which is not in the relation")]
    NotAffineInvariant {
        context: String,
        witness: [Vec<u64>; 3],
        image: Vec<u64>,
    },

    #[error("guard refusal: {what} exceeds the configured bound of {bound}")]
    GuardRefusal { what: String, bound: u64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
