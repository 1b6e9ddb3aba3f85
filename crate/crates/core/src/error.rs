use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Malformed bracket, forest or rational text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("tree of order {order} exceeds series truncation order {max_order}")]
    Truncation { order: usize, max_order: usize },
    #[error("series is not in class B: coefficient at the empty tree is {0}, expected 1")]
    NotInClassB(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("arity mismatch: expected {expected} arguments, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid document: {0}")]
    Format(String),
}
