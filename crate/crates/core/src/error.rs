use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("need at least {min} observations, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("tied values at indices {first} and {second}")]
    TiesPresent { first: usize, second: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("ranks are not a permutation of 1..={n}")]
    NotAPermutation { n: usize },
    #[error("value {value} at index {index} lies outside [0, 1]")]
    OutOfUnitInterval { index: usize, value: f64 },
    #[error("n = {n} is too small (minimum {min})")]
    NTooSmall { n: usize, min: usize },
    #[error("n = {n} exceeds the limit of {max}")]
    NTooLarge { n: usize, max: usize },
    #[error("variance must be positive and finite, got {0}")]
    BadVariance(f64),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("sample has zero spread")]
    DegenerateSample,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
