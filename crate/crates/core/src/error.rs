use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: a distribution spec, an argument outside its domain, a bad flag.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("inconsistent stage game: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("integration error: {0}")]
    Integration(String),
    #[error("degenerate distribution: {0}")]
    Degenerate(String),
    /// A combinatorial or memory guard tripped.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
