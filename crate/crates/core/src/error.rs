use thiserror::Error;

/// Errors shared across the estimator and solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("primitive anchored at -inf requires a builder with a certified integrable tail")]
    NonIntegrableTail,
    #[error("scan grid is empty or degenerate")]
    DegenerateScan,
    #[error("schedule exhausted without convergence ({} estimates recorded)", history.len())]
    NotConverged { history: Vec<(f64, f64)> },
    #[error("translation range is empty")]
    EmptyRange,
    #[error("semigroup is only defined for t >= 0")]
    NegativeTime,
    #[error("declared stability envelope violated (worst ratio {worst_ratio})")]
    StabilityViolation { worst_ratio: f64 },
    #[error("exponent p = {0} is not admissible here")]
    InvalidExponent(f64),
    #[error("contraction condition fails: k = {k} >= 1")]
    NotAContraction { k: f64 },
    #[error("Picard iteration did not reach the residual tolerance in {} steps", residuals.len())]
    MaxIterExceeded { residuals: Vec<f64> },
    #[error("Gronwall hypothesis violated: min delta {delta} <= sum of betas {beta}")]
    HypothesisViolated { delta: f64, beta: f64 },
    #[error("exponents do not satisfy 1/p = 1/q + 1/r with p >= 1")]
    ExponentMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
