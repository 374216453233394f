use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("label error: {0}")]
    Label(String),
}

impl Error {
    /// True for failures caused by the caller's input rather than by the computation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Argument(_) | Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
