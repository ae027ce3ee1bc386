use thiserror::Error;

/// Errors produced by geometry, solvers and inequality suites.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("solver failure: {message}")]
    Solver {
        message: String,
        /// Best (uncertified) objective value reached, if any.
        best: Option<f64>,
    },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("setup error: {0}")]
    Setup(String),
    #[error("geodesic rejected: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    Rejected { defect: f64, tol: f64 },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
