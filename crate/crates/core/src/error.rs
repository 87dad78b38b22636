use thiserror::Error;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Budget,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("field of size {size} exceeds the cap {cap}")]
    FieldTooLarge { size: u128, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomial is not homogeneous (found degrees {0} and {1})")]
    NonHomogeneous(u32, u32),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("{what}: need {needed}, budget allows {cap}")]
    Budget { what: &'static str, needed: u128, cap: u64 },
    #[error("unsupported degree {0}")]
    UnsupportedDegree(u32),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::FieldTooLarge { .. } | Error::Budget { .. } => ErrorKind::Budget,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn budget(what: &'static str, needed: u128, cap: u64) -> Self {
        Error::Budget { what, needed, cap }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
