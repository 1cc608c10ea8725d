use periods_core::error::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("point {z} is within {distance:.2e} of a pole of the term for {form}")]
    PoleProximity { form: String, z: String, distance: f64 },
    #[error("principal-value periods are not supported: {0}")]
    CpvExcluded(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
