use thiserror::Error;

/// Errors produced by path construction, solvers and verifiers.
///
/// `Domain` means a value violates an invariant of the data itself (a time
/// outside the grid, `lower > upper`, NaN input). `Usage` means the call was
/// assembled incorrectly (mismatched grids, hypothesis violations). `Solver`
/// signals an internal consistency failure and should be treated as a bug or
/// corrupted input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }
}
