use thiserror::Error;

/// Errors surfaced by the solver, parameter certification and data loading paths.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("momentum {theta} is at or below the spectral threshold {threshold} for eigenvalue {lambda}")]
    ThetaBelowThreshold {
        theta: f64,
        threshold: f64,
        lambda: f64,
    },

    #[error("no stationary solution: spectral radius {rho} >= 1")]
    NoStationarySolution { rho: f64 },

    #[error("matrix is not symmetric: max asymmetry {asym}")]
    AsymmetricMatrix { asym: f64 },

    #[error("iterates diverged at iteration {iteration} (metric {metric:.3e})")]
    Diverged { iteration: usize, metric: f64 },

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
