//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the reduction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Netlist text could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A structurally invalid netlist (dangling node, bad port set, ...).
    #[error("invalid netlist: {0}")]
    Netlist(String),

    /// Inputs with inconsistent dimensions or preconditions.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix that must be invertible was (numerically) singular.
    #[error("singular matrix in {0}")]
    Singular(String),

    /// The routed operation requires the other index class.
    #[error("wrong index: {0}")]
    WrongIndex(String),

    /// Positive-realness assumptions were violated by the data.
    #[error("not positive real: {0}")]
    NotPositiveReal(String),

    /// An iteration failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Problem exceeds the dense-kernel size limit.
    #[error("system with {n} states exceeds the dense limit {limit}")]
    TooLarge { n: usize, limit: usize },

    /// Model or data file could not be interpreted.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
