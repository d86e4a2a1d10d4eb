use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum OfftError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A sweep or heater locator does not name an element of the network.
    #[error("no such element: {0}")]
    Locator(String),
    /// The computation has no meaningful answer for this input.
    #[error("degenerate result: {0}")]
    Degenerate(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, OfftError>;

pub(crate) fn domain(msg: impl Into<String>) -> OfftError {
    OfftError::Domain(msg.into())
}
