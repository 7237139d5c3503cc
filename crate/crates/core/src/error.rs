//! Shared error type for the whole crate.

use std::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    Domain(String),
    /// Argument outside the supported operating envelope.
    Range(String),
    /// Index past the number of computed items.
    Index { index: usize, count: usize },
    /// An iteration failed to converge or a numerical consistency check failed.
    Numerical(String),
    /// The Jacobi expansion could not be truncated to the requested accuracy.
    Truncation { worst_tail: f64 },
    /// A stated precondition on the inputs does not hold.
    Precondition(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Range(msg) => write!(f, "range error: {msg}"),
            Error::Index { index, count } => {
                write!(f, "index {index} out of range (count {count})")
            }
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::Truncation { worst_tail } => write!(
                f,
                "expansion tail did not fall below tolerance (worst tail {worst_tail:e})"
            ),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
