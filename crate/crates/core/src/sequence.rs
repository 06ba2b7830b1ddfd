//! Ordinal-indexed sequences of Cartesian layers.
//!
//! The torsion sequence of a group lists the closures of the successive
//! torsion quotients.  Order types here are finite sums of copies of omega
//! and a finite remainder, so a sequence is stored as a list of segments:
//! finite runs of layers and omega-runs (a finite prefix followed by one
//! layer repeated forever).
//!
//! Sequences are kept in a canonical form — adjacent runs merged, runs
//! absorbed into a following omega-run's prefix, omega-runs with minimal
//! prefixes, and no trailing trivial layers — which makes derived equality
//! decide equality of the underlying entry functions.

use crate::error::Error;
use crate::multiplicity::CartesianDescriptor;
use crate::ordinal::OrdinalCNF;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// One segment of a torsion sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Segment {
    /// A finite run of layers.
    #[serde(rename = "run")]
    Run(Vec<CartesianDescriptor>),
    /// A finite prefix followed by one layer repeated omega times.
    #[serde(rename = "omega")]
    Omega {
        prefix: Vec<CartesianDescriptor>,
        repeating: CartesianDescriptor,
    },
}

impl Segment {
    fn order_type(&self) -> OrdinalCNF {
        match self {
            Segment::Run(v) => OrdinalCNF::finite(v.len() as u64),
            Segment::Omega { .. } => OrdinalCNF::omega(),
        }
    }
}

/// An ordinal-indexed sequence of Cartesian layers, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct TorsionSequence {
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    segments: Vec<Segment>,
}

impl TryFrom<RawSequence> for TorsionSequence {
    type Error = Error;
    fn try_from(raw: RawSequence) -> Result<Self, Error> {
        TorsionSequence::from_segments(raw.segments)
    }
}

impl From<TorsionSequence> for RawSequence {
    fn from(seq: TorsionSequence) -> Self {
        RawSequence { segments: seq.segments }
    }
}

/// Why a sequence entry violates the torsion-sequence laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The entry is the trivial group.
    Trivial,
    /// A non-final entry has bounded exponent.
    BoundedExponent,
}

/// A single violating entry, by ordinal index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub index: OrdinalCNF,
    pub kind: ViolationKind,
}

/// Result of validating a torsion sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    /// True when no entry violates the laws.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TorsionSequence {
    /// The empty sequence (trivial torsion).
    pub fn empty() -> Self {
        TorsionSequence { segments: Vec::new() }
    }

    /// A sequence consisting of a single finite run.
    pub fn from_layers(layers: Vec<CartesianDescriptor>) -> Result<Self, Error> {
        Self::from_segments(vec![Segment::Run(layers)])
    }

    /// Build from segments, checking that all layers share one prime, and
    /// canonicalize.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self, Error> {
        let mut prime: Option<u64> = None;
        let mut check = |c: &CartesianDescriptor| -> Result<(), Error> {
            match prime {
                None => {
                    prime = Some(c.prime());
                    Ok(())
                }
                Some(p) if p == c.prime() => Ok(()),
                Some(p) => Err(Error::MixedPrimes(p, c.prime())),
            }
        };
        for seg in &segments {
            match seg {
                Segment::Run(v) => {
                    for c in v {
                        check(c)?;
                    }
                }
                Segment::Omega { prefix, repeating } => {
                    for c in prefix {
                        check(c)?;
                    }
                    check(repeating)?;
                }
            }
        }
        let mut seq = TorsionSequence { segments };
        seq.canonicalize();
        Ok(seq)
    }

    /// The canonical segments.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// True for the empty sequence.
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// The common prime of the entries, when the sequence is nonempty.
    pub fn prime(&self) -> Option<u64> {
        match self.segments.first() {
            None => None,
            Some(Segment::Run(v)) => v.first().map(|c| c.prime()),
            Some(Segment::Omega { prefix, repeating }) => {
                Some(prefix.first().unwrap_or(repeating).prime())
            }
        }
    }

    fn canonicalize(&mut self) {
        // Omega-runs with a trivial repeating layer stabilize: only their
        // prefix carries information.
        let drained: Vec<Segment> = std::mem::take(&mut self.segments)
            .into_iter()
            .map(|seg| match seg {
                Segment::Omega { prefix, repeating } if repeating.is_trivial() => {
                    Segment::Run(prefix)
                }
                other => other,
            })
            .collect();
        // Merge runs into following segments and minimize omega prefixes.
        let mut rebuilt: Vec<Segment> = Vec::with_capacity(drained.len());
        for seg in drained {
            match seg {
                Segment::Run(v) if v.is_empty() => {}
                Segment::Run(v) => match rebuilt.last_mut() {
                    Some(Segment::Run(prev)) => prev.extend(v),
                    _ => rebuilt.push(Segment::Run(v)),
                },
                Segment::Omega { prefix, repeating } => {
                    let mut full_prefix = match rebuilt.last_mut() {
                        Some(Segment::Run(prev)) => {
                            let mut p = std::mem::take(prev);
                            rebuilt.pop();
                            p.extend(prefix);
                            p
                        }
                        _ => prefix,
                    };
                    while full_prefix.last() == Some(&repeating) {
                        full_prefix.pop();
                    }
                    rebuilt.push(Segment::Omega { prefix: full_prefix, repeating });
                }
            }
        }
        // Strip trailing trivial layers from a final run.
        if let Some(Segment::Run(v)) = rebuilt.last_mut() {
            while v.last().is_some_and(|c| c.is_trivial()) {
                v.pop();
            }
            if v.is_empty() {
                rebuilt.pop();
            }
        }
        self.segments = rebuilt;
    }

    /// The order type of the sequence.
    pub fn order_type(&self) -> OrdinalCNF {
        self.segments
            .iter()
            .fold(OrdinalCNF::zero(), |acc, seg| acc.add(&seg.order_type()))
    }

    /// The entry at ordinal position `index` (0-based), if within the order
    /// type.
    pub fn entry_at(&self, index: &OrdinalCNF) -> Option<CartesianDescriptor> {
        let mut pos = index.clone();
        for seg in &self.segments {
            match seg.order_type().left_subtract(&pos) {
                Some(rest) => pos = rest,
                None => {
                    // The position falls inside this segment, hence is finite
                    // relative to its start.
                    let offset = pos.as_finite().expect("within-segment offsets are finite")
                        as usize;
                    return Some(match seg {
                        Segment::Run(v) => v[offset].clone(),
                        Segment::Omega { prefix, repeating } => {
                            prefix.get(offset).unwrap_or(repeating).clone()
                        }
                    });
                }
            }
        }
        None
    }

    /// Drop the first `count` positions, keeping the rest of the sequence.
    ///
    /// Errors when `count` exceeds the order type.
    pub fn shift(&self, count: &OrdinalCNF) -> Result<TorsionSequence, Error> {
        let mut pos = count.clone();
        let mut segments = VecDeque::from(self.segments.clone());
        while !pos.is_zero() {
            let Some(head) = segments.pop_front() else {
                return Err(Error::IndexExceedsType {
                    index: count.to_string(),
                    torsion_type: self.order_type().to_string(),
                });
            };
            match head.order_type().left_subtract(&pos) {
                Some(rest) => pos = rest,
                None => {
                    let offset =
                        pos.as_finite().expect("within-segment offsets are finite") as usize;
                    match head {
                        Segment::Run(v) => segments.push_front(Segment::Run(v[offset..].to_vec())),
                        Segment::Omega { prefix, repeating } => {
                            let prefix =
                                if offset < prefix.len() { prefix[offset..].to_vec() } else { Vec::new() };
                            segments.push_front(Segment::Omega { prefix, repeating });
                        }
                    }
                    pos = OrdinalCNF::zero();
                }
            }
        }
        let mut seq = TorsionSequence { segments: segments.into_iter().collect() };
        seq.canonicalize();
        Ok(seq)
    }

    /// Append a single layer at the end of the sequence.
    pub fn append_layer(&self, layer: CartesianDescriptor) -> Result<TorsionSequence, Error> {
        let mut segments = self.segments.clone();
        segments.push(Segment::Run(vec![layer]));
        TorsionSequence::from_segments(segments)
    }

    /// Keep only the positions below `end`.
    pub fn truncate_to(&self, end: &OrdinalCNF) -> TorsionSequence {
        let mut remaining = end.clone();
        let mut kept: Vec<Segment> = Vec::new();
        for seg in &self.segments {
            if remaining.is_zero() {
                break;
            }
            match seg.order_type().left_subtract(&remaining) {
                Some(rest) => {
                    kept.push(seg.clone());
                    remaining = rest;
                }
                None => {
                    let take =
                        remaining.as_finite().expect("within-segment offsets are finite") as usize;
                    let head = match seg {
                        Segment::Run(v) => v[..take].to_vec(),
                        Segment::Omega { prefix, repeating } => (0..take)
                            .map(|i| prefix.get(i).unwrap_or(repeating).clone())
                            .collect(),
                    };
                    kept.push(Segment::Run(head));
                    break;
                }
            }
        }
        let mut seq = TorsionSequence { segments: kept };
        seq.canonicalize();
        seq
    }

    /// The positions in `[start, end)`, re-based at zero.
    ///
    /// Errors when `start` exceeds the order type; an `end` beyond the
    /// order type simply keeps everything from `start` on.
    pub fn slice(&self, start: &OrdinalCNF, end: &OrdinalCNF) -> Result<TorsionSequence, Error> {
        let length = start.left_subtract(end).unwrap_or_else(OrdinalCNF::zero);
        Ok(self.shift(start)?.truncate_to(&length))
    }

    /// Apply a transform to every entry, preserving the segment structure.
    pub fn map_entries(
        &self,
        f: impl Fn(&CartesianDescriptor) -> CartesianDescriptor,
    ) -> TorsionSequence {
        let segments = self
            .segments
            .iter()
            .map(|seg| match seg {
                Segment::Run(v) => Segment::Run(v.iter().map(&f).collect()),
                Segment::Omega { prefix, repeating } => Segment::Omega {
                    prefix: prefix.iter().map(&f).collect(),
                    repeating: f(repeating),
                },
            })
            .collect();
        let mut seq = TorsionSequence { segments };
        seq.canonicalize();
        seq
    }

    /// Concatenate sequences end to end.
    pub fn concat(parts: &[TorsionSequence]) -> Result<TorsionSequence, Error> {
        TorsionSequence::from_segments(
            parts.iter().flat_map(|s| s.segments.iter().cloned()).collect(),
        )
    }

    /// Termwise product of two sequences: entries at equal positions are
    /// multiplied, and the shorter sequence is padded with trivial layers.
    pub fn termwise_product(&self, other: &TorsionSequence) -> Result<TorsionSequence, Error> {
        if let (Some(p), Some(q)) = (self.prime(), other.prime()) {
            if p != q {
                return Err(Error::MixedPrimes(p, q));
            }
        }
        let mut qa: VecDeque<Segment> = self.segments.iter().cloned().collect();
        let mut qb: VecDeque<Segment> = other.segments.iter().cloned().collect();
        let mut out: Vec<Segment> = Vec::new();
        loop {
            match (qa.pop_front(), qb.pop_front()) {
                (None, None) => break,
                (Some(seg), None) => {
                    out.push(seg);
                    out.extend(qa.drain(..));
                    break;
                }
                (None, Some(seg)) => {
                    out.push(seg);
                    out.extend(qb.drain(..));
                    break;
                }
                (Some(Segment::Run(u)), Some(Segment::Run(v))) => {
                    let m = u.len().min(v.len());
                    let head: Vec<CartesianDescriptor> = u[..m]
                        .iter()
                        .zip(&v[..m])
                        .map(|(a, b)| a.product(b).expect("primes checked"))
                        .collect();
                    out.push(Segment::Run(head));
                    if u.len() > m {
                        qa.push_front(Segment::Run(u[m..].to_vec()));
                    }
                    if v.len() > m {
                        qb.push_front(Segment::Run(v[m..].to_vec()));
                    }
                }
                (Some(Segment::Run(u)), Some(Segment::Omega { prefix, repeating })) => {
                    let (head, rest) = run_times_omega(&u, &prefix, &repeating);
                    out.push(Segment::Run(head));
                    qb.push_front(rest);
                }
                (Some(Segment::Omega { prefix, repeating }), Some(Segment::Run(v))) => {
                    let (head, rest) = run_times_omega(&v, &prefix, &repeating);
                    out.push(Segment::Run(head));
                    qa.push_front(rest);
                }
                (
                    Some(Segment::Omega { prefix: pa, repeating: ra }),
                    Some(Segment::Omega { prefix: pb, repeating: rb }),
                ) => {
                    let len = pa.len().max(pb.len());
                    let prefix: Vec<CartesianDescriptor> = (0..len)
                        .map(|i| {
                            let a = pa.get(i).unwrap_or(&ra);
                            let b = pb.get(i).unwrap_or(&rb);
                            a.product(b).expect("primes checked")
                        })
                        .collect();
                    let repeating = ra.product(&rb).expect("primes checked");
                    out.push(Segment::Omega { prefix, repeating });
                }
            }
        }
        let mut seq = TorsionSequence { segments: out };
        seq.canonicalize();
        Ok(seq)
    }

    /// The first ordinal position where two sequences' entries differ, with
    /// both entries at that position (`None` for "past this sequence's end").
    /// Returns `None` when the sequences are equal.
    pub fn first_difference(
        &self,
        other: &TorsionSequence,
    ) -> Option<(OrdinalCNF, Option<CartesianDescriptor>, Option<CartesianDescriptor>)> {
        if self == other {
            return None;
        }
        let mut qa: VecDeque<Segment> = self.segments.iter().cloned().collect();
        let mut qb: VecDeque<Segment> = other.segments.iter().cloned().collect();
        let mut base = OrdinalCNF::zero();
        loop {
            match (qa.pop_front(), qb.pop_front()) {
                (None, None) => {
                    unreachable!("unequal canonical sequences must differ somewhere")
                }
                (Some(seg), None) => {
                    let entry = first_entry(&seg);
                    return Some((base, Some(entry), None));
                }
                (None, Some(seg)) => {
                    let entry = first_entry(&seg);
                    return Some((base, None, Some(entry)));
                }
                (Some(Segment::Run(u)), Some(Segment::Run(v))) => {
                    let m = u.len().min(v.len());
                    for i in 0..m {
                        if u[i] != v[i] {
                            return Some((
                                base.add(&OrdinalCNF::finite(i as u64)),
                                Some(u[i].clone()),
                                Some(v[i].clone()),
                            ));
                        }
                    }
                    base = base.add(&OrdinalCNF::finite(m as u64));
                    if u.len() > m {
                        qa.push_front(Segment::Run(u[m..].to_vec()));
                    }
                    if v.len() > m {
                        qb.push_front(Segment::Run(v[m..].to_vec()));
                    }
                }
                (Some(Segment::Run(u)), Some(Segment::Omega { prefix, repeating })) => {
                    for (i, a) in u.iter().enumerate() {
                        let b = prefix.get(i).unwrap_or(&repeating);
                        if a != b {
                            return Some((
                                base.add(&OrdinalCNF::finite(i as u64)),
                                Some(a.clone()),
                                Some(b.clone()),
                            ));
                        }
                    }
                    let m = u.len();
                    base = base.add(&OrdinalCNF::finite(m as u64));
                    let prefix =
                        if m < prefix.len() { prefix[m..].to_vec() } else { Vec::new() };
                    qb.push_front(Segment::Omega { prefix, repeating });
                }
                (Some(Segment::Omega { prefix, repeating }), Some(Segment::Run(v))) => {
                    for (i, b) in v.iter().enumerate() {
                        let a = prefix.get(i).unwrap_or(&repeating);
                        if a != b {
                            return Some((
                                base.add(&OrdinalCNF::finite(i as u64)),
                                Some(a.clone()),
                                Some(b.clone()),
                            ));
                        }
                    }
                    let m = v.len();
                    base = base.add(&OrdinalCNF::finite(m as u64));
                    let prefix =
                        if m < prefix.len() { prefix[m..].to_vec() } else { Vec::new() };
                    qa.push_front(Segment::Omega { prefix, repeating });
                }
                (
                    Some(Segment::Omega { prefix: pa, repeating: ra }),
                    Some(Segment::Omega { prefix: pb, repeating: rb }),
                ) => {
                    let len = pa.len().max(pb.len());
                    for i in 0..len {
                        let a = pa.get(i).unwrap_or(&ra);
                        let b = pb.get(i).unwrap_or(&rb);
                        if a != b {
                            return Some((
                                base.add(&OrdinalCNF::finite(i as u64)),
                                Some(a.clone()),
                                Some(b.clone()),
                            ));
                        }
                    }
                    if ra != rb {
                        return Some((
                            base.add(&OrdinalCNF::finite(len as u64)),
                            Some(ra.clone()),
                            Some(rb.clone()),
                        ));
                    }
                    base = base.add(&OrdinalCNF::omega());
                }
            }
        }
    }

    /// Check the torsion-sequence laws: every non-final entry has unbounded
    /// exponent, no entry is trivial.
    pub fn validate(&self) -> ValidityReport {
        let mut violations = Vec::new();
        let total = self.order_type();
        let final_index = total.predecessor();
        let mut base = OrdinalCNF::zero();
        let mut check = |index: OrdinalCNF, entry: &CartesianDescriptor| {
            let is_final = Some(&index) == final_index.as_ref();
            if entry.is_trivial() {
                violations.push(Violation { index, kind: ViolationKind::Trivial });
            } else if !is_final && !entry.unbounded_exponent() {
                violations.push(Violation { index, kind: ViolationKind::BoundedExponent });
            }
        };
        for seg in &self.segments {
            match seg {
                Segment::Run(v) => {
                    for (i, entry) in v.iter().enumerate() {
                        check(base.add(&OrdinalCNF::finite(i as u64)), entry);
                    }
                }
                Segment::Omega { prefix, repeating } => {
                    for (i, entry) in prefix.iter().enumerate() {
                        check(base.add(&OrdinalCNF::finite(i as u64)), entry);
                    }
                    check(base.add(&OrdinalCNF::finite(prefix.len() as u64)), repeating);
                }
            }
            base = base.add(&seg.order_type());
        }
        ValidityReport { violations }
    }
}

/// Multiply a finite run against the opening of an omega-run; returns the
/// products and the remaining omega-run.
fn run_times_omega(
    run: &[CartesianDescriptor],
    prefix: &[CartesianDescriptor],
    repeating: &CartesianDescriptor,
) -> (Vec<CartesianDescriptor>, Segment) {
    let head: Vec<CartesianDescriptor> = run
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let b = prefix.get(i).unwrap_or(repeating);
            a.product(b).expect("primes checked")
        })
        .collect();
    let rest_prefix =
        if run.len() < prefix.len() { prefix[run.len()..].to_vec() } else { Vec::new() };
    (head, Segment::Omega { prefix: rest_prefix, repeating: repeating.clone() })
}

fn first_entry(seg: &Segment) -> CartesianDescriptor {
    match seg {
        Segment::Run(v) => v.first().expect("canonical runs are nonempty").clone(),
        Segment::Omega { prefix, repeating } => prefix.first().unwrap_or(repeating).clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cardinal::{Aleph0, Finite};
    use crate::multiplicity::MultiplicitySeq;

    fn full() -> CartesianDescriptor {
        CartesianDescriptor::full(2).unwrap()
    }

    fn cyc(e: u32) -> CartesianDescriptor {
        CartesianDescriptor::cyclic(2, e).unwrap()
    }

    fn omega_full() -> Segment {
        Segment::Omega { prefix: Vec::new(), repeating: full() }
    }

    #[test]
    fn canonical_form_merges_runs_into_omega_prefixes() {
        // [A], [omega-run of B] has the same entries as one omega-run with
        // prefix [A].
        let a = TorsionSequence::from_segments(vec![
            Segment::Run(vec![cyc(9)]),
            Segment::Omega { prefix: Vec::new(), repeating: full() },
        ])
        .unwrap();
        let b = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![cyc(9)],
            repeating: full(),
        }])
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order_type(), OrdinalCNF::omega());
    }

    #[test]
    fn canonical_form_minimizes_omega_prefixes() {
        let a = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![full(), full()],
            repeating: full(),
        }])
        .unwrap();
        let b = TorsionSequence::from_segments(vec![omega_full()]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_form_drops_trailing_trivial_layers() {
        let trivial = CartesianDescriptor::trivial(2).unwrap();
        let a = TorsionSequence::from_layers(vec![full(), trivial.clone(), trivial.clone()])
            .unwrap();
        let b = TorsionSequence::from_layers(vec![full()]).unwrap();
        assert_eq!(a, b);
        // An omega-run repeating the trivial layer stabilizes to its prefix.
        let c = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![full()],
            repeating: trivial,
        }])
        .unwrap();
        assert_eq!(c, b);
        assert_eq!(c.order_type(), OrdinalCNF::finite(1));
    }

    #[test]
    fn mixed_primes_are_rejected_at_construction() {
        let err = TorsionSequence::from_layers(vec![
            CartesianDescriptor::full(2).unwrap(),
            CartesianDescriptor::full(3).unwrap(),
        ])
        .unwrap_err();
        assert_eq!(err, Error::MixedPrimes(2, 3));
    }

    #[test]
    fn entries_are_addressed_by_ordinal_position() {
        // full, full, full, ..., then C_2 at position omega.
        let seq =
            TorsionSequence::from_segments(vec![omega_full(), Segment::Run(vec![cyc(1)])])
                .unwrap();
        assert_eq!(seq.order_type(), OrdinalCNF::omega().successor());
        assert_eq!(seq.entry_at(&OrdinalCNF::zero()), Some(full()));
        assert_eq!(seq.entry_at(&OrdinalCNF::finite(17)), Some(full()));
        assert_eq!(seq.entry_at(&OrdinalCNF::omega()), Some(cyc(1)));
        assert_eq!(seq.entry_at(&OrdinalCNF::omega().successor()), None);
    }

    #[test]
    fn shifting_drops_a_prefix_of_positions() {
        let seq =
            TorsionSequence::from_segments(vec![omega_full(), Segment::Run(vec![cyc(1)])])
                .unwrap();
        // Shift by a finite amount stays inside the omega-run.
        let s3 = seq.shift(&OrdinalCNF::finite(3)).unwrap();
        assert_eq!(s3, seq);
        // Shift by omega exposes the final layer.
        let sw = seq.shift(&OrdinalCNF::omega()).unwrap();
        assert_eq!(sw, TorsionSequence::from_layers(vec![cyc(1)]).unwrap());
        // Shift by the whole order type leaves the empty sequence.
        let all = seq.shift(&OrdinalCNF::omega().successor()).unwrap();
        assert!(all.is_empty());
        // Beyond the order type is an error.
        let err = seq.shift(&OrdinalCNF::monomial(1, 2)).unwrap_err();
        assert!(err.to_string().contains("index exceeds torsion type"));
    }

    #[test]
    fn shift_inside_an_omega_prefix_advances_the_prefix() {
        let seq = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![cyc(5), cyc(6)],
            repeating: full(),
        }])
        .unwrap();
        let s1 = seq.shift(&OrdinalCNF::finite(1)).unwrap();
        assert_eq!(s1.entry_at(&OrdinalCNF::zero()), Some(cyc(6)));
        let s2 = seq.shift(&OrdinalCNF::finite(2)).unwrap();
        assert_eq!(s2, TorsionSequence::from_segments(vec![omega_full()]).unwrap());
    }

    #[test]
    fn termwise_product_multiplies_aligned_positions() {
        let a = TorsionSequence::from_layers(vec![full(), cyc(2)]).unwrap();
        let b = TorsionSequence::from_layers(vec![full()]).unwrap();
        let prod = a.termwise_product(&b).unwrap();
        assert_eq!(prod.order_type(), OrdinalCNF::finite(2));
        let first = prod.entry_at(&OrdinalCNF::zero()).unwrap();
        assert_eq!(first.mults().term(1), Finite(2));
        assert_eq!(first.mults().term(5), Finite(2));
        // The second position is padded with a trivial layer on b's side.
        assert_eq!(prod.entry_at(&OrdinalCNF::finite(1)), Some(cyc(2)));
    }

    #[test]
    fn termwise_product_merges_omega_runs() {
        let a = TorsionSequence::from_segments(vec![
            Segment::Omega { prefix: vec![cyc(3)], repeating: full() },
            Segment::Run(vec![cyc(1)]),
        ])
        .unwrap();
        let b = TorsionSequence::from_segments(vec![omega_full()]).unwrap();
        let prod = a.termwise_product(&b).unwrap();
        assert_eq!(prod.order_type(), OrdinalCNF::omega().successor());
        let first = prod.entry_at(&OrdinalCNF::zero()).unwrap();
        assert_eq!(first.mults().term(3), Finite(2));
        assert_eq!(first.mults().term(4), Finite(1));
        let deep = prod.entry_at(&OrdinalCNF::finite(40)).unwrap();
        assert_eq!(deep.mults().term(7), Finite(2));
        assert_eq!(prod.entry_at(&OrdinalCNF::omega()), Some(cyc(1)));
    }

    #[test]
    fn termwise_product_with_the_empty_sequence_is_identity() {
        let a = TorsionSequence::from_segments(vec![omega_full()]).unwrap();
        let e = TorsionSequence::empty();
        assert_eq!(a.termwise_product(&e).unwrap(), a);
        assert_eq!(e.termwise_product(&a).unwrap(), a);
    }

    #[test]
    fn first_difference_reports_the_earliest_mismatch() {
        let a = TorsionSequence::from_segments(vec![omega_full()]).unwrap();
        let b = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![full(), cyc(2).product(&full()).unwrap()],
            repeating: full(),
        }])
        .unwrap();
        let (pos, ea, eb) = a.first_difference(&b).unwrap();
        assert_eq!(pos, OrdinalCNF::finite(1));
        assert_eq!(ea, Some(full()));
        assert_eq!(eb, Some(cyc(2).product(&full()).unwrap()));
        // A sequence differs from its extension exactly at the extension.
        let c = TorsionSequence::from_segments(vec![omega_full(), Segment::Run(vec![cyc(1)])])
            .unwrap();
        let (pos, ea, eb) = a.first_difference(&c).unwrap();
        assert_eq!(pos, OrdinalCNF::omega());
        assert_eq!(ea, None);
        assert_eq!(eb, Some(cyc(1)));
        assert_eq!(a.first_difference(&a), None);
    }

    #[test]
    fn validation_flags_bounded_non_final_entries() {
        // C_p followed by C_{p^2}: the first entry has bounded exponent.
        let seq = TorsionSequence::from_layers(vec![cyc(1), cyc(2)]).unwrap();
        let report = seq.validate();
        assert!(!report.is_valid());
        assert_eq!(
            report.violations,
            vec![Violation { index: OrdinalCNF::zero(), kind: ViolationKind::BoundedExponent }]
        );
    }

    #[test]
    fn validation_accepts_unbounded_runs_with_a_bounded_final_entry() {
        // Entries at all positions below omega are unbounded; the final
        // entry at omega may be anything nontrivial.
        let seq =
            TorsionSequence::from_segments(vec![omega_full(), Segment::Run(vec![cyc(1)])])
                .unwrap();
        assert!(seq.validate().is_valid());
        // An all-infinite bounded layer in final position is also fine.
        let big = CartesianDescriptor::new(
            2,
            MultiplicitySeq::new(vec![Aleph0], crate::multiplicity::Tail::Zero),
        )
        .unwrap();
        let seq2 = TorsionSequence::from_segments(vec![omega_full(), Segment::Run(vec![big])])
            .unwrap();
        assert!(seq2.validate().is_valid());
        // The empty sequence is vacuously valid.
        assert!(TorsionSequence::empty().validate().is_valid());
    }

    #[test]
    fn validation_flags_a_bounded_repeating_layer() {
        let seq = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![full()],
            repeating: cyc(1),
        }])
        .unwrap();
        let report = seq.validate();
        assert_eq!(
            report.violations,
            vec![Violation {
                index: OrdinalCNF::finite(1),
                kind: ViolationKind::BoundedExponent
            }]
        );
    }

    #[test]
    fn validation_flags_interior_trivial_entries() {
        let trivial = CartesianDescriptor::trivial(2).unwrap();
        let seq = TorsionSequence::from_layers(vec![full(), trivial, full()]).unwrap();
        let report = seq.validate();
        assert_eq!(
            report.violations,
            vec![Violation { index: OrdinalCNF::finite(1), kind: ViolationKind::Trivial }]
        );
    }

    #[test]
    fn json_round_trips_preserve_canonical_segments() {
        let seq =
            TorsionSequence::from_segments(vec![omega_full(), Segment::Run(vec![cyc(1)])])
                .unwrap();
        let json = serde_json::to_string(&seq).unwrap();
        let back: TorsionSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, seq);
    }
}
