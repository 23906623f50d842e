use thiserror::Error;

/// Errors raised by the algebra kernel.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("basis mismatch: expected {expected} classes, found {found}")]
    BasisMismatch { expected: usize, found: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("window too large: {count} basis elements exceed the cap of {cap}")]
    WindowTooLarge { count: usize, cap: usize },
    #[error("no free term in the differential")]
    NoFreeTerm,
    #[error("window excludes the class {0}")]
    WindowExcludes(String),
    #[error("no d0-pair to eliminate")]
    NoPair,
    #[error("series does not converge inside the window: {0}")]
    NonConvergent(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
