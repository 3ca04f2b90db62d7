//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model construction, validation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A scale label is outside `[0, 1]` or not a finite number.
    #[error("invalid scale label {0}: labels must be finite numbers in [0, 1]")]
    InvalidScaleLabel(f64),

    /// No labels left after deduplication.
    #[error("a qualitative scale needs at least one label")]
    EmptyScale,

    /// Two sequences that must have equal length do not.
    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A possibility distribution whose maximum is not the top of the scale.
    #[error("distribution not normalized: {0}")]
    NotNormalized(String),

    /// A level index that does not belong to the scale.
    #[error("level index {index} out of range for a scale of {levels} levels")]
    LevelOutOfRange { index: usize, levels: usize },

    /// A state, action or observation index outside the model.
    #[error("{kind} index {index} out of range (size {size})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        size: usize,
    },

    /// The declared stay action does not keep every state in place with
    /// possibility one, or the stay observation row is not the required
    /// deterministic "nothing" row.
    #[error("invalid stay structure: {0}")]
    InvalidStay(String),

    /// An infinite-horizon solve was requested on a model without a stay action.
    #[error("value iteration requires a stay action")]
    MissingStayAction,

    /// The sweep count exceeded the `#states x #levels` convergence bound,
    /// which signals a model that violates the stay assumption.
    #[error("value iteration exceeded its convergence bound of {bound} sweeps")]
    IterationBoundExceeded { bound: usize },

    /// The observation has possibility bottom under the predicted belief, so
    /// the qualitative belief revision rule is undefined.
    #[error("impossible observation {observation} after action {action}: predicted possibility is bottom")]
    ImpossibleObservation { action: usize, observation: usize },

    /// A belief-space enumeration larger than the configured cap.
    #[error("belief space too large to enumerate: cardinality {cardinality} exceeds cap {cap}")]
    BeliefSpaceTooLarge { cardinality: String, cap: u64 },

    /// The discounted baseline solver did not reach the tolerance.
    #[error("baseline value iteration did not converge within {max_iters} sweeps (residual {residual})")]
    NonConvergence { max_iters: usize, residual: f64 },

    /// Invalid benchmark configuration.
    #[error("invalid grid configuration: {0}")]
    InvalidConfig(String),

    /// Model file parse failure.
    #[error("cannot parse model file: {0}")]
    Parse(String),

    /// Model file content failed validation.
    #[error("invalid model file: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
