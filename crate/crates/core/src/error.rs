use thiserror::Error;

/// Errors produced by the transform engine and its verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("route unavailable: {0}")]
    RouteUnavailable(String),

    #[error("gamma argument {re}+{im}i is outside the accuracy strip")]
    GammaOverflow { re: f64, im: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("ill-conditioned inversion: {0}")]
    IllConditioned(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
