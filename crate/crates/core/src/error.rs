use thiserror::Error;

use crate::modp::RunStats;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("modulus is not prime: {0}")]
    NotPrime(u64),

    #[error("zero has no multiplicative inverse")]
    ZeroInversion,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operands use different moduli ({left} vs {right})")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("precision mismatch: {left} vs {right}")]
    PrecisionMismatch { left: u32, right: u32 },

    #[error("value is not divisible by p")]
    NotDivisible,

    #[error("echelon form has no rows")]
    EmptyForm,

    #[error("echelon form has {rows} rows, {needed} needed for a unique coefficient vector")]
    RankDeficient { rows: usize, needed: usize },

    #[error("index draw budget of {budget} exhausted")]
    TrialBudgetExhausted { budget: u64, stats: RunStats },

    #[error("restart budget exhausted after {} restarts", stats.c0)]
    RestartBudgetExhausted { stats: RunStats },

    #[error("no sample survives digit peeling at level {level}")]
    EmptyLocus { level: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
