//! Error taxonomy shared by the whole crate.
//!
//! Two user-facing classes map onto the CLI exit codes:
//!
//! * [`Error::Config`] — the experiment description itself is invalid (bad JSON,
//!   out-of-range parameter, geometry that violates the far-field condition).
//!   Exit code 1.
//! * [`Error::Data`] / [`Error::Io`] — the inputs or runtime data are unusable
//!   (malformed Touchstone file, mismatched frequency grids, an all-failed
//!   pattern where a valid one is required, unreadable/unwritable paths).
//!   Exit code 2.

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The experiment configuration violates a model invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input or intermediate data violates an operation's contract.
    #[error("data error: {0}")]
    Data(String),

    /// Filesystem failure, annotated with the offending path.
    #[error("I/O error on '{path}': {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Build a configuration error from anything displayable.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Build a data error from anything displayable.
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Wrap an I/O failure with its path for context.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the CLI: 1 for configuration errors, 2 for data/I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data(_) | Error::Io { .. } => 2,
        }
    }

    /// Prefix the message with a context label (e.g. a file name), keeping
    /// the error class. I/O errors already carry their path and pass through.
    pub fn context(self, label: impl std::fmt::Display) -> Self {
        match self {
            Error::Config(msg) => Error::Config(format!("{label}: {msg}")),
            Error::Data(msg) => Error::Data(format!("{label}: {msg}")),
            io @ Error::Io { .. } => io,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
