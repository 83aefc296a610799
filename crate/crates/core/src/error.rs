use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("time {t} lies outside [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("endpoint mismatch: first path ends at ({ax}, {ay}), second starts at ({bx}, {by})")]
    EndpointMismatch { ax: f64, ay: f64, bx: f64, by: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("walk exceeded the step cap of {0}")]
    StepCapExceeded(u64),
    #[error("rejection budget exhausted: {accepted} accepted out of {attempts} attempts")]
    RejectionBudget { attempts: u64, accepted: u64 },
    #[error("incompatible inputs: {0}")]
    Mismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid tie-break: {0}")]
    TieBreak(String),
    #[error("zero speed is outside its regime: largest gap between first-hit times is {gap}")]
    ZeroSpeedRegime { gap: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid_path(msg: impl Into<String>) -> Error {
    Error::InvalidPath(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
