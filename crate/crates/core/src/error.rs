use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A scene violates a geometric precondition (overlap, contact, near contact).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The operation is not available for this combination of bodies.
    #[error("not implemented: {0}")]
    NotImplemented(String),
    /// The scene has no closed-form energy.
    #[error("no analytic form: {0}")]
    NoAnalyticForm(String),
    /// A configured resource limit would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
