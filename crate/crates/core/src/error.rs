//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in the calculator's operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An ordinal operation required a limit ordinal.
    #[error("not a limit ordinal: {0}")]
    NotALimitOrdinal(String),
    /// A value claimed to be prime is not.
    #[error("{0} is not prime")]
    NotPrime(u64),
    /// Descriptors with different primes were combined.
    #[error("mixed primes: {0} and {1}")]
    MixedPrimes(u64, u64),
    /// A torsion-series index lies beyond the sequence's torsion type.
    #[error("index exceeds torsion type: {index} > {torsion_type}")]
    IndexExceedsType { index: String, torsion_type: String },
    /// A presentation does not define a finite p-group.
    #[error("non-finite p-part: the presentation has a free quotient at {prime}")]
    NonFinitePPart { prime: u64 },
    /// An enumeration-backed oracle was asked to handle a group beyond its
    /// size guard.
    #[error("oracle size limit: group order {order} exceeds 2^{limit_log2}")]
    OracleSizeLimit { order: u128, limit_log2: u32 },
    /// An element or generator does not live in the claimed ambient group.
    #[error("generator outside G: {0}")]
    GeneratorOutsideGroup(String),
    /// The descriptor cannot be split into an infinite product.
    #[error("not decomposable: {0}")]
    NotDecomposable(String),
    /// A torsion sequence failed validation.
    #[error("invalid torsion sequence: {0}")]
    InvalidSequence(String),
    /// A construction step received data outside its contract.
    #[error("construction error: {0}")]
    Construction(String),
}
