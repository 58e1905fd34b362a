use thiserror::Error;

use crate::model::PriceVector;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bundle leaves the box [0, b] at item {item}")]
    BundleOutOfBounds { item: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid valuation: {0}")]
    InvalidValuation(String),

    #[error("bundle is not in the {side} demand set of buyer {buyer}")]
    NotPreferredBundle { buyer: usize, side: &'static str },

    #[error("enumeration of {what} needs {needed} entries, budget allows {limit}")]
    EnumerationLimit { what: &'static str, needed: u128, limit: u128 },

    #[error("auction stopped after {rounds} rounds at {prices} without reaching equilibrium ({reason})")]
    RoundLimitExceeded { rounds: usize, prices: PriceVector, reason: String },

    #[error("prices {0} are not Walrasian")]
    NotWalrasian(PriceVector),

    #[error("unit-supply mode requires every supply to be 1")]
    ModeMismatch,

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("unknown valuation family `{0}`")]
    UnknownFamily(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::InternalInvariant(msg.into())
}
