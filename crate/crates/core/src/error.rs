use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("select ordinal {ordinal} out of range (bitvector has {ones} set bits)")]
    NotFound { ordinal: usize, ones: usize },

    /// Caller supplied data that violates an operation's preconditions.
    #[error("invalid input: {0}")]
    Input(String),

    /// An internal navigation request that cannot be satisfied, e.g. asking
    /// for the children of a node without set bits.
    #[error("logic error: {0}")]
    Logic(String),

    #[error("lazy evaluation does not support {0}")]
    UnsupportedStrategy(&'static str),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed index: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
