use thiserror::Error;

/// Errors produced by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A physical or numerical parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An integral or search failed to reach its tolerance.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// A quantity that is infinite for the requested parameters.
    #[error("divergent quantity: {0}")]
    Divergent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
