use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample value {value} at node ({i}, {j}), point ({x}, {y})")]
    NonFiniteSample {
        i: usize,
        j: usize,
        x: f64,
        y: f64,
        value: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("map is not area-preserving: {0}")]
    NotAreaPreserving(String),

    #[error("infeasible constraint masks: {0}")]
    InfeasibleMasks(String),
}

impl Error {
    pub fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
