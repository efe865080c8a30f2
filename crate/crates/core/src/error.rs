use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
///
/// Outcomes that are legitimate answers rather than failures (an empty level
/// set, an embedding obstruction, a missing witness) are reported through
/// result enums, never through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::NumericFailure(msg.into())
}
