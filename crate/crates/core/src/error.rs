//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Errors produced by configuration, evaluation and numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid configuration: bad sizes, out-of-range parameters, malformed
    /// landscape files.
    Config(String),
    /// A query the landscape cannot answer, e.g. the optimum of a custom
    /// fitness table.
    UnsupportedQuery(String),
    /// A numerical argument outside its domain.
    Domain(String),
    /// An iterative computation exhausted its iteration budget.
    Convergence { residual: f64, iterations: usize },
    /// No error-threshold transition was found in the scanned range.
    ThresholdNotFound(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::UnsupportedQuery(msg) => write!(f, "unsupported query: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Convergence {
                residual,
                iterations,
            } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:e})"
            ),
            Error::ThresholdNotFound(msg) => write!(f, "threshold not found: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
