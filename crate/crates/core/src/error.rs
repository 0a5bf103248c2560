use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building or using rings, codes, channels and decoders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ring size must be at least 2, got {0}")]
    RingTooSmall(usize),

    #[error("element {element} is out of range for a ring with {q} elements")]
    ElementOutOfRange { element: usize, q: usize },

    #[error("invalid ring tables: {0}")]
    InvalidRing(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("enumeration of {what} would visit {count} candidates (limit {limit})")]
    EnumerationTooLarge { what: String, count: u128, limit: u128 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("channel scheme does not match the code: {0}")]
    SchemeMismatch(String),

    #[error("invalid channel parameter: {0}")]
    InvalidChannel(String),

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("pseudocodeword error: {0}")]
    Pseudocodeword(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
