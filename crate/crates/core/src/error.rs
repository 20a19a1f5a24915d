use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The classical steady-state equation has no admissible solution.
    #[error("model error: {0}")]
    Model(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence { what: String, iterations: usize },

    /// The drift matrix is not Hurwitz, so no steady state exists.
    #[error("unstable dynamics (spectral abscissa {abscissa:e})")]
    Unstable { abscissa: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("click probability {probability:e} is too small to condition on")]
    DegenerateConditioning { probability: f64 },

    #[error("Fock truncation at dimension {cutoff} discards weight {discarded:e} (tolerance {tolerance:e})")]
    Truncation {
        cutoff: usize,
        discarded: f64,
        tolerance: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
