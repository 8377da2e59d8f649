use thiserror::Error;
use usp_lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A sweep or enumeration would exceed its configured budget.
    #[error("refused: {what} needs {needed} items, cap is {cap}")]
    Refused {
        what: String,
        needed: String,
        cap: u128,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    /// A postcondition that should hold by construction failed.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
