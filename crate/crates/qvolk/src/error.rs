use thiserror::Error;

/// Everything that can go wrong in the laboratory.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("p = {0} is not an odd prime >= 3")]
    InvalidPrime(u64),
    #[error("working precision {0} too small (need >= {1})")]
    PrecisionTooSmall(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor is indistinguishable from zero at precision {0}")]
    DivisorVanishes(i64),
    #[error("precision exhausted: result would carry no digits (absolute precision {0})")]
    PrecisionExhausted(i64),
    #[error("mixed prime contexts: p = {0} vs p = {1}")]
    MixedPrimes(u64, u64),
    #[error("argument is not a principal unit (v(x - 1) = {0:?}, need >= 1)")]
    NotPrincipalUnit(Option<i64>),
    #[error("argument outside the convergence disk (v = {0:?}, need >= {1})")]
    OutsideDisk(Option<i64>, i64),
    #[error("q is not admissible: v(q - 1) must be >= 1")]
    BadQ,
    #[error("mixed cyclotomic rings (levels {0} and {1})")]
    MixedRings(u32, u32),
    #[error("element is not invertible at the working precision")]
    NonInvertible,
    #[error("element is indistinguishable from zero at the working precision")]
    VanishesAtPrecision,
    #[error("character level {0} exceeds ring level {1}")]
    CharLevelExceedsRing(u32, u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("ball representative {0} out of range [0, {1})")]
    BallOutOfRange(u64, u64),
    #[error("spectral table level N = {0} does not match character level n = {1}")]
    UnmatchedLevels(u32, u32),
    #[error("singular denominator: q * xi * e^t = 1 at the working precision")]
    SingularDenominator,
    #[error("Bernoulli oracle limited to m <= 30 (got {0})")]
    BernoulliRange(u32),
    #[error("no stabilization detected up to level {0}")]
    NoStabilization(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
