//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by parsing, evaluation and replay.
#[derive(Debug, Error)]
pub enum Error {
    /// Input bytes are not a well-formed document.
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    /// The document is well-formed but violates a schema invariant.
    #[error("structural error in {context}: {message}")]
    Structural { context: String, message: String },

    /// A timestamp is so far outside the video timeline that the input
    /// is considered corrupt rather than noisy.
    #[error("range error: {0}")]
    Range(String),

    /// Prediction and annotation corpora share no video ids.
    #[error("id mismatch: {0}")]
    IdMismatch(String),

    /// Invalid configuration value (grid, window, memory, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An emission log is not ordered by segment index.
    #[error("unsorted emission log: {0}")]
    UnsortedLog(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    pub fn structural(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Structural {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line interface.
    ///
    /// 2 = unreadable/invalid input, 3 = id-set mismatch, 4 = usage.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::IdMismatch(_) => 3,
            Error::Config(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
