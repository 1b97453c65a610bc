//! Crate-wide error type.

use std::path::PathBuf;

/// Errors surfaced by solvers, sweeps and file output.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor or solver argument violates its domain.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam {
        field: &'static str,
        reason: String,
    },

    /// The dual bisection exhausted its bracket without meeting the budget
    /// tolerance. Reachable only for astronomically extreme budgets or
    /// tolerances, but reported rather than panicking.
    #[error(
        "dual bisection did not converge: budget residual {residual:.3e} \
         after {iterations} iterations"
    )]
    NoConvergence { residual: f64, iterations: u32 },

    /// A sweep point failed; identifies which one.
    #[error("sweep point x = {x}, scheme `{scheme}`: {source}")]
    SweepPoint {
        x: f64,
        scheme: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// File I/O with path context.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A CSV file produced by this crate failed to parse back.
    #[error("{}:{line}: malformed row: {reason}", path.display())]
    CsvParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
