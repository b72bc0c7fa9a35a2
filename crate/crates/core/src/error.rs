//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero input where a nonzero value is required")]
    ZeroInput,
    #[error("constant polynomial where degree >= 1 is required")]
    ConstantPolynomial,
    #[error("not a valid place: {0}")]
    InvalidPlace(String),
    #[error("the infinite place is not allowed here")]
    InfinitePlace,
    #[error("exceptional point: phi_Q(beta) = alpha")]
    ExceptionalPoint,
    #[error("local height is only an upper bound; exact value required")]
    UpperBoundRejected,
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid Drinfeld module: {0}")]
    InvalidModule(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
