//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Tensor or layer shape disagreement.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A precondition on an operation's inputs was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// Empty input where at least one element is required.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A NaN or infinity surfaced where finite values are required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Degenerate data (constant series, zero variance, collapsed range).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Optimizer rejected a step.
    #[error("optimizer error: {0}")]
    Optimizer(String),

    /// Model fitting failed.
    #[error("fitting error: {0}")]
    Fitting(String),

    /// Training run aborted.
    #[error("training error: {0}")]
    Training(String),

    /// Malformed input file.
    #[error("parse error: {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Problem reading or writing a file.
    #[error("io error: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Stored checksum does not match file contents.
    #[error("integrity error: {0}")]
    Integrity(String),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
