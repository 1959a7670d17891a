use alloc::boxed::Box;
use alloc::string::String;

use crate::rational::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("negative weight or coefficient {0}")]
    Negative(Box<Rational>),
    #[error("total masses differ ({left} vs {right}); the measures are not comparable")]
    MassMismatch { left: Box<Rational>, right: Box<Rational> },
    #[error("measure is not normalized (total mass {0})")]
    NotNormalized(Box<Rational>),
    #[error("atom budget exceeded: {reached} atoms > cap {cap}")]
    AtomBudgetExceeded { cap: usize, reached: usize },
    #[error("grid step must be positive, got {0}")]
    NonPositiveStep(Box<Rational>),
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
