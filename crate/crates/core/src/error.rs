use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The input points span an affine subspace of dimension below the ambient one.
    #[error("degenerate input: affine dimension {affine_dim} < {dim}")]
    Degenerate { dim: usize, affine_dim: usize },

    /// An iterative method stopped before certifying its result.
    #[error("numerical failure in {what}: residual {residual:e} after {iterations} iterations")]
    Numerical {
        what: &'static str,
        residual: f64,
        iterations: usize,
    },

    /// The requested configuration exceeds the desk-scale point budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("unsupported dimension {dim} for {what}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical { .. } => 2,
            _ => 1,
        }
    }
}
