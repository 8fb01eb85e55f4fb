use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("incompatible block structure: {0}")]
    IncompatibleShape(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("index {index} out of range: {detail}")]
    IndexRange { index: usize, detail: String },
    #[error("horizon mismatch: {0} vs {1}")]
    HorizonMismatch(usize, usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
