use rug::Integer;
use thiserror::Error;

use crate::fermat::FermatState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative input {0} where a nonnegative integer is required")]
    NegativeInput(Integer),

    #[error("{0} is not a prime congruent to 1 mod 4")]
    NotSumOfTwoSquaresPrime(Integer),

    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(Integer, Integer),

    #[error("curve is singular (discriminant is zero)")]
    SingularCurve,

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("point is not on the curve")]
    NotOnCurve,

    #[error("{p} is not usable here: {reason}")]
    BadPrime { p: Integer, reason: &'static str },

    #[error("modulus {0} is not coprime to 6*discriminant")]
    BadModulus(Integer),

    #[error("doubling sends the point to the identity (point of order at most 2)")]
    DoublingToIdentity,

    #[error("point has finite order: {0}*P is the identity")]
    TorsionPoint(u32),

    #[error("digit budget of {budget} exceeded at k = {k}")]
    DigitBudget {
        k: u32,
        budget: u64,
        partial: Box<Vec<FermatState>>,
    },

    #[error("tau value inconsistent with the recurrence at k = {0}")]
    InconsistentTau(u32),

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
