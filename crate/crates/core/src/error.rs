use thiserror::Error;

/// Errors raised by model construction, material updates and solvers.
#[derive(Debug, Error)]
pub enum ModelError {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A discretization or model setup violates a structural constraint.
    #[error("configuration error: {0}")]
    Config(String),

    /// A material state is inconsistent (e.g. non-positive yield stress).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An iterative solve failed to converge within its budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A post-processing operation received too little data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ModelError>;
