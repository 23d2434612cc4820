use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain an operation accepts.
    #[error("input out of domain: {0}")]
    InputDomain(String),

    /// A measurement family or state failed structural validation.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A correlation table is internally inconsistent (for example signalling).
    #[error("inconsistent correlation: {0}")]
    Consistency(String),

    /// A correlation does not satisfy a predicate the operation requires.
    #[error("precondition `{predicate}` not satisfied")]
    Precondition { predicate: &'static str },

    /// Too few samples to form an estimate.
    #[error("estimate undefined: {0}; increase the number of rounds")]
    EstimationUndefined(String),

    /// A closed form hit a zero denominator.
    #[error("singular: {0}")]
    Singular(String),

    /// The threshold formula has a negative radicand at these parameters.
    #[error("no threshold: radicand {radicand} is negative")]
    NoThreshold { radicand: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
