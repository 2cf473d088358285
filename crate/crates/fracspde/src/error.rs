//! Error type shared by all library modules.

use thiserror::Error;

/// Errors produced by grid construction, kernel evaluation, noise sampling,
/// and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor argument is outside its admissible range.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The grid fails the resolution heuristic for the requested time.
    #[error("grid under-resolved: {0}")]
    UnderResolved(String),

    /// Array dimensions do not match between cooperating objects.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A field value became NaN or infinite during time stepping.
    #[error("non-finite field value at step {step}")]
    NonFinite { step: usize },

    /// Picard iteration did not reach the tolerance within the iteration cap.
    #[error("no convergence after {} iterations (last distance {:.3e})",
            distances.len(), distances.last().copied().unwrap_or(f64::NAN))]
    NoConvergence { distances: Vec<f64> },

    /// A Monte Carlo replicate failed; carries the underlying error.
    #[error("replicate {replicate} failed: {source}")]
    ReplicateFailed {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
