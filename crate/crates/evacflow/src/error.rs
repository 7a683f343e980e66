use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. `Validation` and `Numerical` map onto the
/// CLI exit codes 1 and 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("density {rho} outside [0, {lanes}]")]
    DensityOutOfRange { rho: f64, lanes: f64 },

    #[error("flux {gamma} exceeds capacity {capacity}")]
    InfeasibleFlux { gamma: f64, capacity: f64 },

    #[error("network validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad input rather than the solver.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::DensityOutOfRange { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
