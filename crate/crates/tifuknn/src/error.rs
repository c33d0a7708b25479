//! Crate error type, with a stable process exit code per error class.

use std::io;

/// All errors surfaced by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Reading or writing a file/stream failed.
    #[error("io: {0}")]
    Io(#[from] io::Error),

    /// Input data is malformed or violates a documented precondition
    /// (bad CSV, unknown snapshot version, empty corpus after filtering, ...).
    #[error("data: {0}")]
    Data(String),

    /// A configuration value is out of its documented range
    /// (decay outside (0,1\], blend outside \[0,1\], unknown method name, ...).
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Shorthand for a [`Error::Data`] with a formatted message.
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Shorthand for a [`Error::Config`] with a formatted message.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code for this error class. Usage errors (bad flags) exit
    /// with 2 via the argument parser before an `Error` is ever constructed.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 3,
            Error::Io(_) => 4,
            Error::Data(_) => 5,
        }
    }

    /// Short class tag used in the one-line stderr report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Data(_) => "data",
            Error::Config(_) => "config",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        // CSV errors are IO errors when the underlying reader failed, and data
        // errors when the file content itself is malformed.
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Data(format!("csv: {other:?}")),
            }
        } else {
            Error::Data(format!("csv: {e}"))
        }
    }
}
