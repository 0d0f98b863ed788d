use std::io;

use thiserror::Error;

/// Errors produced by the solvers, verifiers and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed game or profile file. `line` is 1-based; a truncated file
    /// reports the line just past the end.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("infeasible grid: {0}")]
    InfeasibleGrid(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not found: {0}")]
    NotFound(String),

    /// A guarantee that should hold by construction did not. Either the
    /// inputs are outside the regime the guarantee covers, or there is a bug.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
