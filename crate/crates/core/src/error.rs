//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by parsers, loaders and capped operations.
///
/// Contract violations (dimension mismatches, invalid moduli passed to
/// internal algebra) panic instead; these variants cover operational
/// failures a caller is expected to handle.
#[derive(Debug, Error)]
pub enum Error {
    /// A circuit or Pauli literal failed to parse. Lines are 1-indexed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A dense operation would exceed the configured dimension cap.
    #[error("dimension {required} exceeds cap {cap}")]
    CapExceeded { required: u64, cap: u64 },

    /// A matrix loaded from disk is not unitary within tolerance.
    #[error("matrix is not unitary (max deviation {max_dev:.3e})")]
    NotUnitary { max_dev: f64 },

    /// A matrix file has inconsistent dimensions.
    #[error("bad matrix shape: {0}")]
    BadShape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
