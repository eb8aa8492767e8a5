// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the torsion pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("d = {0} does not define a quadratic field")]
    DegenerateD(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("p^n = {p}^{n} does not fit the residue arithmetic (must stay below 2^63)")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("|D| = {disc} exceeds the class group bound {bound}")]
    BoundExceeded { disc: u64, bound: u64 },
    #[error("field Q(sqrt({0})) is not real")]
    NotRealField(i64),
    #[error("presentation has a free generator; the group is infinite")]
    InfiniteGroup,
    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("element is not a unit modulo p^n")]
    NotAUnit,
    #[error("#A_(n+1) = {upper} is not divisible by #A_n = {lower}")]
    NonDivisible { lower: String, upper: String },
    /// The level cutoff was reached; `trace` holds every level computed.
    #[error("no stabilization up to level {n_max}")]
    NoStabilization {
        n_max: u32,
        trace: Box<Vec<crate::rayclass::RayClassLevel>>,
    },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
