use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("algebra mismatch: {0} vs {1}")]
    AlgebraMismatch(String, String),
    #[error("vectors have mixed lengths")]
    LengthMismatch,
    #[error("{0} is not divisible by p")]
    NotDivisible(u64),
    #[error("prime {0} is excluded for this input (non-invertible denominator)")]
    BadPrime(u64),
    #[error("prime must be an odd prime >= 3, got {0}")]
    InvalidPrime(u64),
    #[error("no p-map available: supply explicit values or a matrix realization")]
    MissingPmap,
    #[error("p-th power of basis matrix {0} escapes the span of the realization")]
    NotRestrictedUnderRealization(usize),
    #[error("character does not vanish on the derived subalgebra (bracket ({0},{1}))")]
    InvalidCharacter(usize, usize),
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("degree cap {got} too small; need at least {need}")]
    DegreeCapTooSmall { got: usize, need: usize },
    #[error("automorphism does not preserve the ideal within degree budget: {0}")]
    PreservationFailure(String),
    #[error("monomial space of size {0} exceeds the configured cap {1}")]
    ResourceLimit(usize, usize),
    #[error("element is not central: ad({0}) does not vanish")]
    NotCentral(String),
    #[error("homomorphism images not verified")]
    UnverifiedHom,
    #[error("k! is not invertible: symmetrization needs degree < p, got degree {0} at p = {1}")]
    Invertibility(usize, u64),
    #[error("input is not homogeneous")]
    NonHomogeneous,
    #[error("no good primes among the requested ones")]
    NoGoodPrimes,
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element of degree {0} exceeds the degree cap {1}")]
    DegreeOverflow(usize, usize),
    #[error("vector lies outside the computed subspace")]
    OutsideSpan,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
