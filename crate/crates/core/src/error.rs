use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants follow the failure classes the command-line front end maps to
/// exit codes: usage problems, broken preconditions, and numerical domain
/// aborts.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// The inputs are well-formed but fall outside the region where the
    /// computation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An unknown tag or malformed option.
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! contract {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Contract(format!($($arg)+)));
        }
    };
}
pub(crate) use contract;
