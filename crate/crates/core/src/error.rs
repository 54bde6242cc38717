use thiserror::Error;

/// Errors produced by the allocation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model, scenario, grid or policy failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// A transmit energy exceeds the stored energy (or is negative).
    #[error("infeasible allocation: requested {requested} with {available} stored")]
    Infeasible { requested: f64, available: f64 },

    /// A battery level fell outside the hull of a tabulated grid.
    #[error("battery level {level} outside grid [0, {top}]")]
    Extrapolation { level: f64, top: f64 },

    /// A brute-force reference was asked to enumerate more than its cap.
    #[error("refused: {needed} evaluations exceed the cap of {cap}")]
    Refused { needed: f64, cap: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
