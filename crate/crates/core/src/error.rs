use thiserror::Error;

/// Errors raised by state construction and the analytic formulas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not positive: minimum eigenvalue {min_eigenvalue:.3e}")]
    NonPhysical { min_eigenvalue: f64 },

    #[error("argument outside the domain of the formula: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("target has no correlated partner (|n̂E| ≈ 0)")]
    ZeroCorrelation,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
