use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("site index {index} out of range for chain of {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },

    #[error("time step {dt} exceeds the cap {cap} (pass an explicit override to accept the error)")]
    StepTooLarge { dt: f64, cap: f64 },

    #[error("exact propagator refused: {0}")]
    ExactRefused(String),

    #[error("fit did not converge after {iterations} iterations (residual {residual:.3e})")]
    FitDiverged { iterations: usize, residual: f64 },

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
