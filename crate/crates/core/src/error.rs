use thiserror::Error;

/// Errors produced by parsing, geometry evaluation and integration.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable index {index} out of range for dimension {dim}")]
    VarOutOfRange { index: usize, dim: usize },

    #[error("math domain error: {0}")]
    MathDomain(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular metric: |det g| = {det:.3e} at {point:?}")]
    SingularMetric { det: f64, point: Vec<f64> },

    #[error("point {point:?} lies outside the admitted region")]
    ExcludedRegion { point: Vec<f64> },

    #[error("transport generator is not skew: max |A_(ab)| = {max_violation:.3e}")]
    SkewnessViolation { max_violation: f64 },

    #[error("momentum is zero; rescaling function undefined")]
    ZeroMomentum,

    #[error("sampling exhausted: found {found} admitted points out of {requested} after {attempts} attempts")]
    SamplingExhausted {
        requested: usize,
        found: usize,
        attempts: usize,
    },

    #[error("integration exceeded max_steps = {max_steps}")]
    MaxStepsExceeded { max_steps: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
