//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input data or parameters that fail a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed file content; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Constraint configuration that admits no solution or is inconsistent.
    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    /// Exhaustive enumeration would exceed the candidate-set guard.
    #[error("enumeration guard exceeded: {candidates} candidate sets > {limit}")]
    GuardExceeded { candidates: u128, limit: u64 },

    /// A broken invariant that indicates a bug or an inconsistent oracle.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
