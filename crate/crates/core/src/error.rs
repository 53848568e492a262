use thiserror::Error;

/// Errors raised by the model, the equilibrium solver and the analysis layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// The requested construction does not exist for these parameters
    /// (for example the equilibrium ray when p is 0 or 1).
    #[error("degenerate case: {0}")]
    Degenerate(String),
    /// A result contradicted a guarantee of the model. Indicates a bug or
    /// parameters sitting on an excluded degeneracy.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
