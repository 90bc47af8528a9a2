use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid experiment setup, reported before any round runs.
    #[error("{field}: {message}")]
    Config { field: String, message: String },

    /// A caller broke an operation's precondition (usually a policy bug).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Exhaustive search refused because the instance is too large.
    #[error("instance has {tuples} action tuples, above the limit of {limit}")]
    OracleGuard { tuples: u128, limit: u128 },

    #[error("cannot aggregate traces of different lengths ({expected} vs {found})")]
    TraceLength { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config { field: field.to_string(), message: message.into() }
    }

    pub(crate) fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }
}
