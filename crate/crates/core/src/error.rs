use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} is not congruent to 3 mod 4")]
    WrongResidueClass(u64),
    #[error("{what} = {value} exceeds the configured maximum {max}")]
    TooLarge { what: &'static str, value: u64, max: u64 },
    #[error("polynomial {0:?} is not a monic irreducible modulus of the requested degree")]
    BadModulus(Vec<u32>),
    #[error("encoding {0} is not an element of the field")]
    BadEncoding(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a square")]
    NotASquare,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("series argument |t| = {0} is outside the disc of convergence")]
    Divergent(f64),
    #[error("characteristic {0} is too small; Legendre curves here need p >= 7")]
    CharacteristicTooSmall(u32),
    #[error("lambda must lie outside {{0, 1}}")]
    SingularCurve,
    #[error("lambda is not a nonzero square other than 1")]
    NotASquareLambda,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("invalid pair ({a}, {b})")]
    InvalidPair { a: u32, b: u32 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("{0} is not a negative discriminant")]
    BadDiscriminant(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("N = {0} is not congruent to 0 or 3 mod 4")]
    BadResidue(u64),
    #[error("swarm has not been annotated with curve data")]
    NotAnnotated,
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
