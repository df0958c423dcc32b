use thiserror::Error;

/// Domain violations raised by the metric, bound and simulation algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{param} out of range: expected {expected}")]
    OutOfRange {
        param: &'static str,
        expected: &'static str,
    },
    #[error("precision is undefined: the classifier passes nothing")]
    UndefinedPrecision,
    #[error("inconsistent inputs: {0}")]
    Inconsistent(&'static str),
    #[error("latency unknown for {0}")]
    LatencyUnknown(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

impl ModelError {
    pub fn range(param: &'static str, expected: &'static str) -> Self {
        ModelError::OutOfRange { param, expected }
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
