//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's contract (shape or modulus
    /// mismatch, non-unit residue, failed validation bullet, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The input is well-formed but outside what the operation supports
    /// (composite modulus for a generator search, L+1 not prime, ...).
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A bounded search ran out of budget before finding a result.
    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),

    /// A text input could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 validation, 3 I/O, 4 search failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Unsupported(_) | Error::Parse { .. } => 2,
            Error::Io(_) => 3,
            Error::SearchExhausted(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
