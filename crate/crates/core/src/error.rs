use thiserror::Error;

use crate::algebra::AlgebraDescriptor;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("power iteration did not converge after {iterations} iterations (last relative change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("unsupported for {descriptor}: {reason}")]
    Unsupported { descriptor: AlgebraDescriptor, reason: &'static str },

    #[error("invalid regime: {0}")]
    Regime(String),

    #[error("tolerance {tol:e} unreachable within {cap} steps (would need {needed})")]
    ToleranceUnreachable { tol: f64, cap: usize, needed: f64 },

    #[error("iteration diverged at step {step}: increments {increments:?} stopped decreasing")]
    Divergence { step: usize, increments: Vec<f64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate sampling: all {samples} samples had vanishing control")]
    DegenerateSampling { samples: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::Shape { expected: expected.to_string(), found: found.to_string() }
    }

    /// Wraps the error with a short description of what was running.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// The innermost error, skipping any [`Error::Context`] layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
