use rheojet_core::GeometryError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown tensor `{0}`")]
    UnknownTensor(String),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl VerifyError {
    /// Process exit code: 2 for usage and configuration problems, 3 for
    /// numeric degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            VerifyError::Geometry(e) if e.is_degeneracy() => 3,
            VerifyError::Geometry(GeometryError::SamplingExhausted { .. }) => 3,
            _ => 2,
        }
    }
}
