//! Isomorphism classification and embedding decisions.
//!
//! Topological isomorphism of descriptors is decided invariant by
//! invariant: prime, free rank, torsion type, then the layers in order.
//! Abstract isomorphism collapses further: when both groups have a torsion
//! closure of unbounded exponent, that closure alone decides; when both
//! are bounded, abstract and topological agree; a bounded group is never
//! abstractly isomorphic to an unbounded one.
//!
//! Every verdict ships evidence: a match lists each compared invariant
//! with the shared value, a mismatch exhibits exactly one invariant with
//! both values.

use crate::cardinal::CardinalCount;
use crate::descriptor::ProPDescriptor;
use crate::error::Error;
use crate::multiplicity::{CartesianDescriptor, MultiplicitySeq};
use crate::ordinal::OrdinalCNF;
use crate::sequence::TorsionSequence;
use crate::torsion::closure_of_torsion;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Which equivalence the certificate speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationMode {
    Topological,
    Abstract,
}

/// An invariant the classifier compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    Prime,
    FreeRank,
    TorsionType,
    TorsionSequence,
    LayerAt(OrdinalCNF),
    ClosureOfTorsion,
}

/// The value of an invariant on one side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantValue {
    Prime(u64),
    Rank(CardinalCount),
    Type(OrdinalCNF),
    Layer(Option<CartesianDescriptor>),
    Sequence(TorsionSequence),
}

/// One compared invariant with the values found on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckedInvariant {
    pub invariant: Invariant,
    pub left: InvariantValue,
    pub right: InvariantValue,
}

/// What the verdict rests on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// All compared invariants agree; each is listed with its shared value.
    Match { compared: Vec<CheckedInvariant> },
    /// Exactly one invariant refutes the isomorphism.
    Mismatch { witness: CheckedInvariant },
}

/// A classification verdict with its evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCertificate {
    pub isomorphic: bool,
    pub mode: ClassificationMode,
    pub evidence: Evidence,
}

fn mismatch(mode: ClassificationMode, witness: CheckedInvariant) -> IsoCertificate {
    IsoCertificate { isomorphic: false, mode, evidence: Evidence::Mismatch { witness } }
}

/// Decide topological isomorphism.
pub fn topological_iso(a: &ProPDescriptor, b: &ProPDescriptor) -> IsoCertificate {
    let mode = ClassificationMode::Topological;
    let mut compared = Vec::new();
    if a.prime() != b.prime() {
        return mismatch(mode, CheckedInvariant {
            invariant: Invariant::Prime,
            left: InvariantValue::Prime(a.prime()),
            right: InvariantValue::Prime(b.prime()),
        });
    }
    compared.push(CheckedInvariant {
        invariant: Invariant::Prime,
        left: InvariantValue::Prime(a.prime()),
        right: InvariantValue::Prime(b.prime()),
    });
    if a.free_rank() != b.free_rank() {
        return mismatch(mode, CheckedInvariant {
            invariant: Invariant::FreeRank,
            left: InvariantValue::Rank(a.free_rank()),
            right: InvariantValue::Rank(b.free_rank()),
        });
    }
    compared.push(CheckedInvariant {
        invariant: Invariant::FreeRank,
        left: InvariantValue::Rank(a.free_rank()),
        right: InvariantValue::Rank(b.free_rank()),
    });
    let ta = a.torsion_seq().order_type();
    let tb = b.torsion_seq().order_type();
    if ta != tb {
        return mismatch(mode, CheckedInvariant {
            invariant: Invariant::TorsionType,
            left: InvariantValue::Type(ta),
            right: InvariantValue::Type(tb),
        });
    }
    compared.push(CheckedInvariant {
        invariant: Invariant::TorsionType,
        left: InvariantValue::Type(ta),
        right: InvariantValue::Type(tb),
    });
    if let Some((index, left, right)) = a.torsion_seq().first_difference(b.torsion_seq()) {
        return mismatch(mode, CheckedInvariant {
            invariant: Invariant::LayerAt(index),
            left: InvariantValue::Layer(left),
            right: InvariantValue::Layer(right),
        });
    }
    compared.push(CheckedInvariant {
        invariant: Invariant::TorsionSequence,
        left: InvariantValue::Sequence(a.torsion_seq().clone()),
        right: InvariantValue::Sequence(b.torsion_seq().clone()),
    });
    IsoCertificate { isomorphic: true, mode, evidence: Evidence::Match { compared } }
}

/// Decide abstract isomorphism.
pub fn abstract_iso(a: &ProPDescriptor, b: &ProPDescriptor) -> IsoCertificate {
    let mode = ClassificationMode::Abstract;
    if a.prime() != b.prime() {
        return mismatch(mode, CheckedInvariant {
            invariant: Invariant::Prime,
            left: InvariantValue::Prime(a.prime()),
            right: InvariantValue::Prime(b.prime()),
        });
    }
    let ca = closure_of_torsion(a);
    let cb = closure_of_torsion(b);
    match (ca.unbounded_exponent(), cb.unbounded_exponent()) {
        (true, true) => {
            // With unbounded torsion closures the closure alone decides.
            if ca == cb {
                IsoCertificate {
                    isomorphic: true,
                    mode,
                    evidence: Evidence::Match {
                        compared: vec![
                            CheckedInvariant {
                                invariant: Invariant::Prime,
                                left: InvariantValue::Prime(a.prime()),
                                right: InvariantValue::Prime(b.prime()),
                            },
                            CheckedInvariant {
                                invariant: Invariant::ClosureOfTorsion,
                                left: InvariantValue::Layer(Some(ca)),
                                right: InvariantValue::Layer(Some(cb)),
                            },
                        ],
                    },
                }
            } else {
                mismatch(mode, CheckedInvariant {
                    invariant: Invariant::ClosureOfTorsion,
                    left: InvariantValue::Layer(Some(ca)),
                    right: InvariantValue::Layer(Some(cb)),
                })
            }
        }
        (false, false) => {
            // Bounded torsion closures: abstract and topological agree.
            let mut cert = topological_iso(a, b);
            cert.mode = mode;
            cert
        }
        _ => mismatch(mode, CheckedInvariant {
            invariant: Invariant::ClosureOfTorsion,
            left: InvariantValue::Layer(Some(ca)),
            right: InvariantValue::Layer(Some(cb)),
        }),
    }
}

/// One batch of factor assignments in an embedding witness: `copies`
/// summands `C_{p^source_exp}` of the source map into distinct summands
/// `C_{p^target_exp}` of the target's torsion closure, each by
/// multiplication with `p^{target_exp - source_exp}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub source_exp: u32,
    pub target_exp: u64,
    pub copies: u64,
}

/// A finite embedding witness at a truncation.
///
/// Demands are the capped cyclic factors of the source's layers at stages
/// below `level`; each free generator of the source becomes a chain of
/// strictly increasing rungs approximating a coherent sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWitness {
    pub level: u32,
    pub cap: u64,
    pub assignments: Vec<Assignment>,
    pub chains: Vec<Vec<u64>>,
}

/// The embedding verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingDecision {
    Embeds(EmbeddingWitness),
    NotSupported { reason: String },
}

/// Tracks how much of the target's torsion closure each support position
/// still offers.
struct Supply<'a> {
    mults: &'a MultiplicitySeq,
    used: BTreeMap<u64, u64>,
}

impl<'a> Supply<'a> {
    fn new(mults: &'a MultiplicitySeq) -> Self {
        Supply { mults, used: BTreeMap::new() }
    }

    fn available(&self, v: u64) -> CardinalCount {
        let used = self.used.get(&v).copied().unwrap_or(0);
        match self.mults.term(v) {
            CardinalCount::Aleph0 => CardinalCount::Aleph0,
            CardinalCount::Finite(n) => CardinalCount::Finite(n.saturating_sub(used)),
        }
    }

    fn take(&mut self, v: u64, n: u64) {
        *self.used.entry(v).or_insert(0) += n;
    }

    /// The smallest support position `>= min` with availability left.
    fn next_available_at_least(&self, min: u64) -> u64 {
        for k in 1.. {
            let Some(v) = self.mults.nth_support(k) else {
                panic!("unbounded supply must have infinite support");
            };
            if v >= min && !self.available(v).is_zero() {
                return v;
            }
        }
        unreachable!()
    }
}

/// Decide whether the first group embeds into the second, producing a
/// finite witness truncated at `level` with counts capped at `cap`.
///
/// Supported whenever the target's torsion closure has unbounded exponent;
/// other targets are declined, not refuted.
pub fn decide_embedding(
    a: &ProPDescriptor,
    b: &ProPDescriptor,
    level: u32,
    cap: u64,
) -> Result<EmbeddingDecision, Error> {
    if a.prime() != b.prime() {
        return Err(Error::MixedPrimes(a.prime(), b.prime()));
    }
    let target_closure = closure_of_torsion(b);
    if !target_closure.unbounded_exponent() {
        return Ok(EmbeddingDecision::NotSupported {
            reason: "the target's torsion closure has bounded exponent".into(),
        });
    }
    let mut supply = Supply::new(target_closure.mults());
    // Capped demands from the source's layers at finite stages below level.
    let mut demands: BTreeMap<u32, u64> = BTreeMap::new();
    for stage in 0..level {
        if let Some(layer) = a.torsion_seq().entry_at(&OrdinalCNF::finite(stage as u64)) {
            for (exp, count) in layer.mults().truncate(level, cap) {
                *demands.entry(exp).or_insert(0) += count;
            }
        }
    }
    let mut assignments = Vec::new();
    for (&source_exp, &count) in &demands {
        let mut remaining = count;
        while remaining > 0 {
            let v = supply.next_available_at_least(source_exp as u64);
            let here = match supply.available(v) {
                CardinalCount::Aleph0 => remaining,
                CardinalCount::Finite(n) => n.min(remaining),
            };
            supply.take(v, here);
            assignments.push(Assignment { source_exp, target_exp: v, copies: here });
            remaining -= here;
        }
    }
    // One chain of `level` strictly increasing rungs per free generator.
    let chain_count = a.free_rank().capped(cap);
    let mut chains = Vec::with_capacity(chain_count as usize);
    for _ in 0..chain_count {
        let mut rungs = Vec::with_capacity(level as usize);
        let mut min = 1u64;
        for _ in 0..level {
            let v = supply.next_available_at_least(min);
            supply.take(v, 1);
            rungs.push(v);
            min = v + 1;
        }
        chains.push(rungs);
    }
    Ok(EmbeddingDecision::Embeds(EmbeddingWitness { level, cap, assignments, chains }))
}
