use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight mismatch: |lambda| = {0}, |tau| = {1}")]
    WeightMismatch(usize, usize),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("field mismatch: q = {0} vs q = {1}")]
    FieldMismatch(u32, u32),
    #[error("interval parameter h = {h} out of range for degree n = {n}")]
    IntervalRange { n: usize, h: usize },
    #[error("unknown factorization function `{0}`")]
    UnknownFunction(String),
    #[error("invalid parameter for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("no closed-form expansion for `{0}`")]
    NoClosedForm(String),
    #[error("(n, h) = ({n}, {h}) outside the theorem range 0 <= h <= n - 5")]
    OutsideTheoremRange { n: usize, h: usize },
    #[error("(n, h) = ({n}, {h}) outside the admissible range h <= n - 2")]
    OutsideRelaxedRange { n: usize, h: usize },
    #[error("enumeration of {needed} polynomials exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("character is trivial")]
    TrivialCharacter,
    #[error("character is not primitive")]
    NotPrimitive,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
