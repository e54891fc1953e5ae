use thiserror::Error;

/// Errors raised anywhere in the certified pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An interval was too wide to decide a floor, sign or comparison.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range (stored length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("zero input")]
    ZeroInput,

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("no convergent with q > {threshold} among the first {searched} terms")]
    NoConvergentFound { threshold: String, searched: usize },

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("fixed-point iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("degenerate problem spec: {0}")]
    DegenerateSpec(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A recomputed constant is looser than the printed one by more than the drift tolerance.
    #[error("constant drift: {0}")]
    ConstantDrift(String),

    #[error("ledger step {step:?} does not replay: {detail}")]
    ReplayMismatch { step: String, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }

    pub fn is_precision(&self) -> bool {
        matches!(self, Error::PrecisionExhausted(_))
    }
}
