use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("rational {num}/{den} is not a reduced rate in [0, 1]")]
    BadRational { num: u64, den: u64 },
    #[error("word {0} is not a Christoffel word")]
    NotChristoffel(String),
    #[error("not swappable: {0}")]
    NotSwappable(String),
    #[error("cost {cost} undefined at v = {v}")]
    CostDomain { cost: String, v: f64 },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("period not certified within {0} steps")]
    Uncertified(usize),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Internal errors mean a numerical claim failed, not that the input was bad.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParam(msg.into())
}
