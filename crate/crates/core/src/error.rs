use thiserror::Error;

/// Errors raised by the library. Every variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("capacity exceeded: {what} (size {size}, limit {limit})")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("invalid placement: {0}")]
    Placement(String),
    #[error("not admissible: {0}")]
    Admissibility(String),
    #[error("switching condition violated: {0}")]
    Condition(String),
    #[error("inexact division: {0}")]
    Inexact(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn capacity(what: &'static str, size: usize, limit: usize) -> Self {
        Error::Capacity { what, size, limit }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
