use thiserror::Error;

/// Errors produced by the evaluators, operators and the verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("gamma pole: {0}")]
    Pole(String),
    #[error("argument outside operator domain: {0}")]
    Domain(String),
    #[error("no convergence after {evaluations} evaluations (error estimate {estimate:e}, target {target:e})")]
    Convergence {
        evaluations: usize,
        estimate: f64,
        target: f64,
    },
    #[error("integrand does not decay fast enough: {0}")]
    Decay(String),
    #[error("finite-difference stencil does not fit: {0}")]
    Stencil(String),
    #[error("grid is empty after validity filtering ({generated} candidates generated)")]
    EmptyGrid { generated: usize },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("missing symbol `{0}`")]
    MissingSymbol(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Param(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
