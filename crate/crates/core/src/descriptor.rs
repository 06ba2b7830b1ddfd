//! Descriptors for the groups the calculus manipulates.
//!
//! A pro-p descriptor packages a prime, an ordinal-indexed torsion sequence,
//! and the rank of the torsion-free part.  Its discrete mirror describes the
//! dual side: a direct sum indexed by the same sequence plus a divisible
//! part.  Both are plain data; the operations on them live in the torsion
//! calculus and the classifier.

use crate::cardinal::CardinalCount;
use crate::error::Error;
use crate::multiplicity::is_prime;
use crate::sequence::{TorsionSequence, ValidityReport};
use serde::{Deserialize, Serialize};

/// A countably based abelian pro-p group, up to topological isomorphism of
/// the data the calculus tracks: the torsion sequence and the free rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProP", into = "RawProP")]
pub struct ProPDescriptor {
    prime: u64,
    torsion_seq: TorsionSequence,
    free_rank: CardinalCount,
}

#[derive(Serialize, Deserialize)]
struct RawProP {
    prime: u64,
    torsion_seq: TorsionSequence,
    free_rank: CardinalCount,
}

impl TryFrom<RawProP> for ProPDescriptor {
    type Error = Error;
    fn try_from(raw: RawProP) -> Result<Self, Error> {
        ProPDescriptor::new(raw.prime, raw.torsion_seq, raw.free_rank)
    }
}

impl From<ProPDescriptor> for RawProP {
    fn from(d: ProPDescriptor) -> Self {
        RawProP { prime: d.prime, torsion_seq: d.torsion_seq, free_rank: d.free_rank }
    }
}

impl ProPDescriptor {
    /// Build a descriptor, checking the prime and that the sequence's
    /// entries use the same prime.
    pub fn new(
        prime: u64,
        torsion_seq: TorsionSequence,
        free_rank: CardinalCount,
    ) -> Result<Self, Error> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        if let Some(q) = torsion_seq.prime() {
            if q != prime {
                return Err(Error::MixedPrimes(prime, q));
            }
        }
        Ok(ProPDescriptor { prime, torsion_seq, free_rank })
    }

    /// The trivial group at `prime`.
    pub fn trivial(prime: u64) -> Result<Self, Error> {
        Self::new(prime, TorsionSequence::empty(), CardinalCount::ZERO)
    }

    /// The free pro-p group of the given rank.
    pub fn free(prime: u64, rank: CardinalCount) -> Result<Self, Error> {
        Self::new(prime, TorsionSequence::empty(), rank)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn torsion_seq(&self) -> &TorsionSequence {
        &self.torsion_seq
    }

    pub fn free_rank(&self) -> CardinalCount {
        self.free_rank
    }

    /// Replace the torsion sequence, keeping prime and free rank.
    pub fn with_torsion_seq(&self, seq: TorsionSequence) -> Result<Self, Error> {
        Self::new(self.prime, seq, self.free_rank)
    }

    /// True when both the torsion sequence and the free part are trivial.
    pub fn is_trivial(&self) -> bool {
        self.torsion_seq.is_empty() && self.free_rank.is_zero()
    }

    /// Check the torsion-sequence laws for this descriptor.
    pub fn validate(&self) -> ValidityReport {
        self.torsion_seq.validate()
    }
}

/// A countable discrete torsion-plus-divisible abelian group: the mirror of
/// a pro-p descriptor under duality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDiscrete", into = "RawDiscrete")]
pub struct DiscreteDescriptor {
    prime: u64,
    ulm_seq: TorsionSequence,
    divisible_rank: CardinalCount,
}

#[derive(Serialize, Deserialize)]
struct RawDiscrete {
    prime: u64,
    ulm_seq: TorsionSequence,
    divisible_rank: CardinalCount,
}

impl TryFrom<RawDiscrete> for DiscreteDescriptor {
    type Error = Error;
    fn try_from(raw: RawDiscrete) -> Result<Self, Error> {
        DiscreteDescriptor::new(raw.prime, raw.ulm_seq, raw.divisible_rank)
    }
}

impl From<DiscreteDescriptor> for RawDiscrete {
    fn from(d: DiscreteDescriptor) -> Self {
        RawDiscrete { prime: d.prime, ulm_seq: d.ulm_seq, divisible_rank: d.divisible_rank }
    }
}

impl DiscreteDescriptor {
    pub fn new(
        prime: u64,
        ulm_seq: TorsionSequence,
        divisible_rank: CardinalCount,
    ) -> Result<Self, Error> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        if let Some(q) = ulm_seq.prime() {
            if q != prime {
                return Err(Error::MixedPrimes(prime, q));
            }
        }
        Ok(DiscreteDescriptor { prime, ulm_seq, divisible_rank })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn ulm_seq(&self) -> &TorsionSequence {
        &self.ulm_seq
    }

    pub fn divisible_rank(&self) -> CardinalCount {
        self.divisible_rank
    }
}
