use thiserror::Error;

/// Errors surfaced by the numeric routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The working precision needed to certify a result exceeds the configured cap.
    #[error("precision cap exceeded: {requested} digits needed, cap is {cap}")]
    ResourceLimit { requested: u64, cap: u64 },
    /// Argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or out-of-range input.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
