use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed user input: spec files, slope strings, addresses.
    #[error("invalid input: {0}")]
    Input(String),
    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A configurable search ran out of its walk budget.
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    /// Violation of an internal consistency assertion. Never caused by
    /// valid input; indicates a bug in the engine itself.
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => { crate::error::Error::Input(format!($($arg)*)) };
}

macro_rules! internal_err {
    ($($arg:tt)*) => { crate::error::Error::Internal(format!($($arg)*)) };
}

/// Internal assertion: like `assert!` but surfaces as `Error::Internal`
/// instead of a panic, so the CLI can map it to its own exit code.
macro_rules! ensure_internal {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(internal_err!($($arg)*));
        }
    };
}

pub(crate) use ensure_internal;
pub(crate) use input_err;
pub(crate) use internal_err;
