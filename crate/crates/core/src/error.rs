use thiserror::Error;

/// Failure classes shared by every module. The CLI maps each class onto an
/// exit code, so new variants must pick one of the existing [`ErrorKind`]s.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("conditioning event {event} has probability {mass:e}")]
    NullEvent { event: String, mass: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("validation error: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Structural,
    Domain,
    Resource,
    Validation,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Structural(_) => ErrorKind::Structural,
            Error::Domain(_) | Error::NullEvent { .. } => ErrorKind::Domain,
            Error::Resource(_) => ErrorKind::Resource,
            Error::Validation(_) => ErrorKind::Validation,
        }
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
