use thiserror::Error;

/// Failure modes of the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument or configuration outside the admissible set.
    #[error("domain error: {0}")]
    Domain(String),
    /// Requested accuracy not reached.
    #[error("accuracy error: {what}: estimated error {estimate:e} exceeds {tolerance:e}")]
    Accuracy {
        what: String,
        estimate: f64,
        tolerance: f64,
    },
    /// Non-finite intermediate value or failed iteration.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Data violate the source regularity hypothesis.
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
