use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of an operation was not met by its inputs.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Operands live at different levels; the caller must mod-switch first.
    #[error("level mismatch: {left} vs {right}")]
    Alignment { left: usize, right: usize },

    #[error("scale mismatch: {left} vs {right}")]
    Scale { left: f64, right: f64 },

    /// No modulus left to rescale by.
    #[error("multiplicative depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("no Galois key for rotation step {0}")]
    MissingGaloisKey(i64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed serialized data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DepthExhausted(_) => 3,
            Error::Io(_) | Error::Format(_) | Error::Json(_) | Error::Csv(_) => 4,
            _ => 2,
        }
    }

    /// Prefixes the message with `context`, keeping the error kind.
    pub fn with_context(self, context: impl std::fmt::Display) -> Self {
        match self {
            Error::Contract(m) => Error::Contract(format!("{context}: {m}")),
            Error::DepthExhausted(m) => Error::DepthExhausted(format!("{context}: {m}")),
            Error::Dimension(m) => Error::Dimension(format!("{context}: {m}")),
            Error::Format(m) => Error::Format(format!("{context}: {m}")),
            other => other,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
