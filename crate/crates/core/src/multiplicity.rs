//! Multiplicity sequences and Cartesian layer descriptors.
//!
//! A Cartesian group `prod_i (C_{p^i})^{alpha_i}` is determined by its prime
//! and the sequence `alpha_1, alpha_2, ...` of factor multiplicities.  The
//! calculator restricts to eventually periodic sequences: a finite prefix
//! followed by an all-zero tail, an all-infinite tail, or a repeating
//! pattern.  Every operation in the crate preserves that class, and each
//! class member has a unique minimal representative computed by
//! [`MultiplicitySeq::normalize`].

use crate::cardinal::{Aleph0, CardinalCount, Finite};
use crate::error::Error;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Tail behaviour of a multiplicity sequence after its explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// All remaining multiplicities are zero (bounded exponent).
    Zero,
    /// All remaining multiplicities are countably infinite.
    #[serde(rename = "aleph0")]
    AllAleph0,
    /// The pattern repeats forever.
    #[serde(rename = "rep")]
    Periodic(Vec<CardinalCount>),
}

/// An eventually periodic sequence of multiplicities, indexed from 1.
///
/// Values are always held in canonical form: the periodic pattern is
/// primitive (not a power of a shorter pattern), degenerate patterns are
/// rewritten to the named tails, and the prefix is as short as possible.
/// Canonical forms are unique, so derived equality decides equality of the
/// underlying term functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawSeq", into = "RawSeq")]
pub struct MultiplicitySeq {
    prefix: Vec<CardinalCount>,
    tail: Tail,
}

#[derive(Serialize, Deserialize)]
struct RawSeq {
    prefix: Vec<CardinalCount>,
    tail: Tail,
}

impl From<RawSeq> for MultiplicitySeq {
    fn from(raw: RawSeq) -> Self {
        MultiplicitySeq::new(raw.prefix, raw.tail)
    }
}

impl From<MultiplicitySeq> for RawSeq {
    fn from(seq: MultiplicitySeq) -> Self {
        RawSeq { prefix: seq.prefix, tail: seq.tail }
    }
}

impl MultiplicitySeq {
    /// Build a sequence and normalize it.
    pub fn new(prefix: Vec<CardinalCount>, tail: Tail) -> Self {
        let mut seq = MultiplicitySeq { prefix, tail };
        seq.canonicalize();
        seq
    }

    /// The all-zero sequence.
    pub fn zero() -> Self {
        MultiplicitySeq { prefix: Vec::new(), tail: Tail::Zero }
    }

    /// The sequence with multiplicity one at every index: `prod_i C_{p^i}`.
    pub fn all_ones() -> Self {
        MultiplicitySeq::new(Vec::new(), Tail::Periodic(vec![Finite(1)]))
    }

    /// A single cyclic factor `C_{p^exp}` (multiplicity one at `exp`).
    pub fn cyclic(exp: u32) -> Self {
        Self::single(exp, Finite(1))
    }

    /// Multiplicity `count` at index `exp`, zero elsewhere.
    pub fn single(exp: u32, count: CardinalCount) -> Self {
        assert!(exp >= 1, "factor exponents are indexed from 1");
        let mut prefix = vec![Finite(0); exp as usize];
        prefix[exp as usize - 1] = count;
        MultiplicitySeq::new(prefix, Tail::Zero)
    }

    /// The explicit prefix of the canonical form.
    pub fn prefix(&self) -> &[CardinalCount] {
        &self.prefix
    }

    /// The tail of the canonical form.
    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Return the canonical form (the value itself: normalization is enforced
    /// by every constructor, so this is idempotent by construction).
    pub fn normalize(&self) -> Self {
        self.clone()
    }

    fn canonicalize(&mut self) {
        if let Tail::Periodic(pat) = &mut self.tail {
            // Reduce to the primitive root of the pattern.
            let len = pat.len();
            assert!(len > 0, "periodic patterns must be nonempty");
            for d in 1..=len {
                if len % d == 0 && (d..len).all(|k| pat[k] == pat[k % d]) {
                    pat.truncate(d);
                    break;
                }
            }
            if pat.iter().all(|c| c.is_zero()) {
                self.tail = Tail::Zero;
            } else if pat.as_slice() == [Aleph0] {
                self.tail = Tail::AllAleph0;
            }
        }
        // Absorb prefix entries that the tail already produces.
        match &mut self.tail {
            Tail::Zero => {
                while self.prefix.last() == Some(&Finite(0)) {
                    self.prefix.pop();
                }
            }
            Tail::AllAleph0 => {
                while self.prefix.last() == Some(&Aleph0) {
                    self.prefix.pop();
                }
            }
            Tail::Periodic(pat) => {
                while self.prefix.last() == pat.last() {
                    self.prefix.pop();
                    pat.rotate_right(1);
                }
            }
        }
    }

    /// The multiplicity at 1-based index `i`.
    pub fn term(&self, i: u64) -> CardinalCount {
        assert!(i >= 1, "multiplicities are indexed from 1");
        if i <= self.prefix.len() as u64 {
            return self.prefix[i as usize - 1];
        }
        let offset = i - self.prefix.len() as u64 - 1;
        match &self.tail {
            Tail::Zero => Finite(0),
            Tail::AllAleph0 => Aleph0,
            Tail::Periodic(pat) => pat[(offset % pat.len() as u64) as usize],
        }
    }

    /// True when every multiplicity is zero (the trivial group).
    pub fn is_trivial(&self) -> bool {
        self.prefix.is_empty() && self.tail == Tail::Zero
    }

    /// True when only finitely many multiplicities are nonzero, i.e. the
    /// group `prod_i (C_{p^i})^{alpha_i}` has bounded exponent.
    pub fn bounded_exponent(&self) -> bool {
        self.tail == Tail::Zero
    }

    /// True when infinitely many multiplicities are nonzero (the sequence
    /// does not tend to zero), i.e. the group has unbounded exponent.
    pub fn unbounded_exponent(&self) -> bool {
        !self.bounded_exponent()
    }

    /// True when the group is finite: bounded exponent and finite counts.
    pub fn is_finite_group(&self) -> bool {
        self.bounded_exponent() && self.prefix.iter().all(|c| c.is_finite())
    }

    /// For a single cyclic factor `C_{p^r}` returns `Some(r)`.
    pub fn as_cyclic(&self) -> Option<u32> {
        if self.tail != Tail::Zero {
            return None;
        }
        let mut found = None;
        for (k, c) in self.prefix.iter().enumerate() {
            match c {
                Finite(0) => continue,
                Finite(1) if found.is_none() => found = Some(k as u32 + 1),
                _ => return None,
            }
        }
        found
    }

    /// Pointwise sum of two sequences.
    pub fn pointwise_add(&self, other: &MultiplicitySeq) -> MultiplicitySeq {
        let cut = self.prefix.len().max(other.prefix.len()) as u64;
        let prefix: Vec<CardinalCount> =
            (1..=cut).map(|i| self.term(i) + other.term(i)).collect();
        let tail = match (self.tail_at(cut), other.tail_at(cut)) {
            (Tail::Zero, t) | (t, Tail::Zero) => t,
            (Tail::AllAleph0, _) | (_, Tail::AllAleph0) => Tail::AllAleph0,
            (Tail::Periodic(a), Tail::Periodic(b)) => {
                let len = a.len().lcm(&b.len());
                Tail::Periodic((0..len).map(|k| a[k % a.len()] + b[k % b.len()]).collect())
            }
        };
        MultiplicitySeq::new(prefix, tail)
    }

    /// The tail of the sequence as seen from position `cut` onward (the
    /// returned tail's first produced value is `term(cut + 1)`).
    fn tail_at(&self, cut: u64) -> Tail {
        match &self.tail {
            Tail::Zero => Tail::Zero,
            Tail::AllAleph0 => Tail::AllAleph0,
            Tail::Periodic(pat) => {
                debug_assert!(cut >= self.prefix.len() as u64);
                let shift = ((cut - self.prefix.len() as u64) % pat.len() as u64) as usize;
                let mut rotated = pat.clone();
                rotated.rotate_left(shift);
                Tail::Periodic(rotated)
            }
        }
    }

    /// The 1-based index (exponent) of the k-th nonzero multiplicity, if one
    /// exists.
    pub fn nth_support(&self, k: u64) -> Option<u64> {
        assert!(k >= 1);
        let mut seen = 0u64;
        for (idx, c) in self.prefix.iter().enumerate() {
            if !c.is_zero() {
                seen += 1;
                if seen == k {
                    return Some(idx as u64 + 1);
                }
            }
        }
        let (pat_nonzero, pat_len, pat): (u64, u64, Vec<CardinalCount>) = match &self.tail {
            Tail::Zero => return None,
            Tail::AllAleph0 => (1, 1, vec![Aleph0]),
            Tail::Periodic(pat) => (
                pat.iter().filter(|c| !c.is_zero()).count() as u64,
                pat.len() as u64,
                pat.clone(),
            ),
        };
        debug_assert!(pat_nonzero > 0, "canonical periodic tails are not all-zero");
        let remaining = k - seen;
        let full_repeats = (remaining - 1) / pat_nonzero;
        let mut within = remaining - full_repeats * pat_nonzero;
        for (j, c) in pat.iter().enumerate() {
            if !c.is_zero() {
                within -= 1;
                if within == 0 {
                    return Some(self.prefix.len() as u64 + full_repeats * pat_len + j as u64 + 1);
                }
            }
        }
        unreachable!("pattern holds {pat_nonzero} nonzero slots");
    }

    /// Number of nonzero multiplicities, when finite.
    pub fn support_size(&self) -> Option<u64> {
        if self.tail != Tail::Zero {
            return None;
        }
        Some(self.prefix.iter().filter(|c| !c.is_zero()).count() as u64)
    }

    /// Total number of cyclic factors counted with multiplicity.
    pub fn total_factors(&self) -> CardinalCount {
        if self.tail != Tail::Zero {
            return Aleph0;
        }
        self.prefix.iter().copied().sum()
    }

    /// Keep only the multiplicities whose 1-based support rank `m` satisfies
    /// `m = residue (mod modulus)`; all other indices become zero.
    ///
    /// This is the residue-class index partition used to split an unbounded
    /// layer into infinitely many unbounded pieces: taking
    /// `modulus = 2^{n+1}, residue = 2^n` selects the support positions of
    /// dyadic valuation `n`, and `modulus = 2^k, residue = 0` those of
    /// valuation at least `k`.
    pub fn mask_support_mod(&self, modulus: u64, residue: u64) -> MultiplicitySeq {
        assert!(modulus >= 1 && residue < modulus);
        let mut rank = 0u64;
        let mut prefix: Vec<CardinalCount> = Vec::with_capacity(self.prefix.len());
        for c in &self.prefix {
            if c.is_zero() {
                prefix.push(Finite(0));
            } else {
                rank += 1;
                prefix.push(if rank % modulus == residue % modulus { *c } else { Finite(0) });
            }
        }
        let tail = match &self.tail {
            Tail::Zero => Tail::Zero,
            Tail::AllAleph0 => {
                let pat = vec![Aleph0];
                self.masked_tail(&pat, rank, modulus, residue)
            }
            Tail::Periodic(pat) => self.masked_tail(pat, rank, modulus, residue),
        };
        MultiplicitySeq::new(prefix, tail)
    }

    fn masked_tail(
        &self,
        pat: &[CardinalCount],
        prefix_rank: u64,
        modulus: u64,
        residue: u64,
    ) -> Tail {
        let nz = pat.iter().filter(|c| !c.is_zero()).count() as u64;
        debug_assert!(nz > 0);
        // Ranks advance by `nz` per repeat, so the kept/dropped decision is
        // periodic in the repeat number with period `modulus / gcd`.
        let repeats = modulus / nz.gcd(&modulus);
        let mut big = Vec::with_capacity((repeats as usize) * pat.len());
        let mut rank = prefix_rank;
        for _ in 0..repeats {
            for c in pat {
                if c.is_zero() {
                    big.push(Finite(0));
                } else {
                    rank += 1;
                    big.push(if rank % modulus == residue % modulus { *c } else { Finite(0) });
                }
            }
        }
        Tail::Periodic(big)
    }

    /// The `idx`-th entry (0-based) of the canonical flattening of the layer
    /// into single cyclic factors, as a factor exponent.
    ///
    /// The flattening walks anti-diagonals of the (support rank, copy) grid,
    /// so infinite multiplicities do not starve later support points.
    /// Returns `None` once a finite layer is exhausted.
    pub fn flatten_nth(&self, idx: u64) -> Option<u64> {
        let total = self.total_factors();
        if let Finite(n) = total {
            if idx >= n {
                return None;
            }
        }
        let mut emitted = 0u64;
        for diag in 1u64.. {
            for k in 1..=diag {
                let copy = diag + 1 - k;
                let Some(exp) = self.nth_support(k) else { break };
                if Finite(copy) <= self.term(exp) {
                    if emitted == idx {
                        return Some(exp);
                    }
                    emitted += 1;
                }
            }
        }
        unreachable!("an infinite layer flattens to an infinite list");
    }

    /// Remove the first `k` factors of the canonical flattening from the
    /// layer, returning the remaining multiset.
    pub fn flatten_residual(&self, k: u64) -> MultiplicitySeq {
        let mut removed: Vec<u64> = Vec::new();
        for idx in 0..k {
            match self.flatten_nth(idx) {
                Some(exp) => removed.push(exp),
                None => break,
            }
        }
        self.subtract_singles(&removed)
    }

    /// Subtract one copy at each listed exponent (counts must be available).
    pub fn subtract_singles(&self, exponents: &[u64]) -> MultiplicitySeq {
        if exponents.is_empty() {
            return self.clone();
        }
        let max = *exponents.iter().max().expect("nonempty");
        let cut = max.max(self.prefix.len() as u64);
        let mut prefix: Vec<CardinalCount> = (1..=cut).map(|i| self.term(i)).collect();
        for &e in exponents {
            let slot = &mut prefix[e as usize - 1];
            *slot = match *slot {
                Aleph0 => Aleph0,
                Finite(n) => {
                    assert!(n > 0, "no copy available at exponent {e}");
                    Finite(n - 1)
                }
            };
        }
        MultiplicitySeq::new(prefix, self.tail_at(cut))
    }

    /// The factors surviving a finite truncation: `(exponent, copies)` for
    /// exponents up to `level`, each count capped at `cap`.
    pub fn truncate(&self, level: u32, cap: u64) -> Vec<(u32, u64)> {
        (1..=level)
            .filter_map(|i| {
                let c = self.term(i as u64).capped(cap);
                (c > 0).then_some((i, c))
            })
            .collect()
    }
}

/// Primality check by trial division; group primes are small in practice.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A Cartesian group `prod_i (C_{p^i})^{alpha_i}` at a fixed prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCartesian", into = "RawCartesian")]
pub struct CartesianDescriptor {
    prime: u64,
    mults: MultiplicitySeq,
}

#[derive(Serialize, Deserialize)]
struct RawCartesian {
    prime: u64,
    mults: MultiplicitySeq,
}

impl TryFrom<RawCartesian> for CartesianDescriptor {
    type Error = Error;
    fn try_from(raw: RawCartesian) -> Result<Self, Error> {
        CartesianDescriptor::new(raw.prime, raw.mults)
    }
}

impl From<CartesianDescriptor> for RawCartesian {
    fn from(c: CartesianDescriptor) -> Self {
        RawCartesian { prime: c.prime, mults: c.mults }
    }
}

impl CartesianDescriptor {
    /// Build a layer descriptor, validating the prime.
    pub fn new(prime: u64, mults: MultiplicitySeq) -> Result<Self, Error> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        Ok(CartesianDescriptor { prime, mults })
    }

    /// The trivial group at the given prime.
    pub fn trivial(prime: u64) -> Result<Self, Error> {
        Self::new(prime, MultiplicitySeq::zero())
    }

    /// The full product `prod_i C_{p^i}`.
    pub fn full(prime: u64) -> Result<Self, Error> {
        Self::new(prime, MultiplicitySeq::all_ones())
    }

    /// A single cyclic group `C_{p^exp}`.
    pub fn cyclic(prime: u64, exp: u32) -> Result<Self, Error> {
        Self::new(prime, MultiplicitySeq::cyclic(exp))
    }

    /// The layer's prime.
    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// The layer's multiplicity sequence.
    pub fn mults(&self) -> &MultiplicitySeq {
        &self.mults
    }

    /// True for the trivial group.
    pub fn is_trivial(&self) -> bool {
        self.mults.is_trivial()
    }

    /// True when the layer has unbounded exponent.
    pub fn unbounded_exponent(&self) -> bool {
        self.mults.unbounded_exponent()
    }

    /// True when the layer is a finite group.
    pub fn is_finite_group(&self) -> bool {
        self.mults.is_finite_group()
    }

    /// `Some(r)` when the layer is the single cyclic group `C_{p^r}`.
    pub fn as_cyclic(&self) -> Option<u32> {
        self.mults.as_cyclic()
    }

    /// Pointwise product of two layers at the same prime.
    pub fn product(&self, other: &CartesianDescriptor) -> Result<CartesianDescriptor, Error> {
        if self.prime != other.prime {
            return Err(Error::MixedPrimes(self.prime, other.prime));
        }
        Ok(CartesianDescriptor {
            prime: self.prime,
            mults: self.mults.pointwise_add(&other.mults),
        })
    }

    /// Same layer with a different multiplicity sequence.
    pub fn with_mults(&self, mults: MultiplicitySeq) -> CartesianDescriptor {
        CartesianDescriptor { prime: self.prime, mults }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(values: &[u64]) -> Vec<CardinalCount> {
        values.iter().map(|&v| Finite(v)).collect()
    }

    #[test]
    fn normalization_rewrites_degenerate_tails() {
        // prefix [1,1] with repeating [0] has tail Zero.
        let m = MultiplicitySeq::new(fin(&[1, 1]), Tail::Periodic(vec![Finite(0)]));
        assert_eq!(m.prefix(), fin(&[1, 1]).as_slice());
        assert_eq!(*m.tail(), Tail::Zero);
        // repeating [aleph0] is the named all-infinite tail.
        let m = MultiplicitySeq::new(Vec::new(), Tail::Periodic(vec![Aleph0]));
        assert_eq!(*m.tail(), Tail::AllAleph0);
    }

    #[test]
    fn normalization_minimizes_the_prefix() {
        // prefix [1] + repeating [1] is all ones: prefix empty.
        let m = MultiplicitySeq::new(fin(&[1]), Tail::Periodic(vec![Finite(1)]));
        assert!(m.prefix().is_empty());
        assert_eq!(*m.tail(), Tail::Periodic(vec![Finite(1)]));
        // Absorbing rotates the pattern to keep the term function intact.
        let m = MultiplicitySeq::new(fin(&[5, 2]), Tail::Periodic(vec![Finite(1), Finite(2)]));
        // terms: 5,2,1,2,1,2,... = prefix [5] + repeating [2,1]
        assert_eq!(m.prefix(), fin(&[5]).as_slice());
        assert_eq!(*m.tail(), Tail::Periodic(vec![Finite(2), Finite(1)]));
        for (i, want) in [(1, 5u64), (2, 2), (3, 1), (4, 2), (5, 1)] {
            assert_eq!(m.term(i), Finite(want), "index {i}");
        }
    }

    #[test]
    fn normalization_reduces_patterns_to_their_primitive_root() {
        let m = MultiplicitySeq::new(
            Vec::new(),
            Tail::Periodic(vec![Finite(1), Finite(2), Finite(1), Finite(2)]),
        );
        assert_eq!(*m.tail(), Tail::Periodic(vec![Finite(1), Finite(2)]));
    }

    #[test]
    fn normalization_preserves_the_term_function() {
        // As pinned in the interface contract: indices up to three times the
        // representation size are compared against the raw reading.
        let raw_prefix = fin(&[0, 3, 0]);
        let raw_pat = vec![Finite(2), Finite(0), Finite(2), Finite(0)];
        let raw = |i: u64| -> CardinalCount {
            if i <= 3 {
                raw_prefix[i as usize - 1]
            } else {
                raw_pat[((i - 4) % 4) as usize]
            }
        };
        let m = MultiplicitySeq::new(raw_prefix.clone(), Tail::Periodic(raw_pat.clone()));
        for i in 1..=(3 * (raw_prefix.len() as u64 + raw_pat.len() as u64)) {
            assert_eq!(m.term(i), raw(i), "index {i}");
        }
    }

    #[test]
    fn predicates_follow_the_tail() {
        assert!(MultiplicitySeq::zero().is_trivial());
        assert!(MultiplicitySeq::zero().bounded_exponent());
        let bounded = MultiplicitySeq::new(vec![Aleph0], Tail::Zero);
        assert!(bounded.bounded_exponent());
        assert!(!bounded.is_finite_group());
        assert!(!bounded.is_trivial());
        assert!(MultiplicitySeq::all_ones().unbounded_exponent());
        assert!(MultiplicitySeq::cyclic(3).is_finite_group());
        assert_eq!(MultiplicitySeq::cyclic(3).as_cyclic(), Some(3));
        assert_eq!(MultiplicitySeq::all_ones().as_cyclic(), None);
        assert_eq!(MultiplicitySeq::single(2, Finite(2)).as_cyclic(), None);
    }

    #[test]
    fn pointwise_addition_handles_mixed_tails() {
        let ones = MultiplicitySeq::all_ones();
        let cyc = MultiplicitySeq::cyclic(2);
        let sum = ones.pointwise_add(&cyc);
        assert_eq!(sum.term(1), Finite(1));
        assert_eq!(sum.term(2), Finite(2));
        assert_eq!(sum.term(3), Finite(1));
        assert_eq!(sum.term(9), Finite(1));

        let evens = MultiplicitySeq::new(Vec::new(), Tail::Periodic(vec![Finite(0), Finite(1)]));
        let odds = MultiplicitySeq::new(Vec::new(), Tail::Periodic(vec![Finite(1), Finite(0)]));
        assert_eq!(evens.pointwise_add(&odds), MultiplicitySeq::all_ones());

        let inf = MultiplicitySeq::new(Vec::new(), Tail::AllAleph0);
        assert_eq!(ones.pointwise_add(&inf), inf);
    }

    #[test]
    fn pointwise_addition_aligns_pattern_phases() {
        // prefix [7] + repeating [1,2] gives terms 7,1,2,1,2,...
        let a = MultiplicitySeq::new(fin(&[7]), Tail::Periodic(vec![Finite(1), Finite(2)]));
        // repeating [3,4] gives 3,4,3,4,...
        let b = MultiplicitySeq::new(Vec::new(), Tail::Periodic(vec![Finite(3), Finite(4)]));
        let sum = a.pointwise_add(&b);
        for i in 1..=12 {
            assert_eq!(sum.term(i), a.term(i) + b.term(i), "index {i}");
        }
    }

    #[test]
    fn support_enumeration_walks_nonzero_indices() {
        // terms 0,2,0,1,0,1,0,1,... : support 2,4,6,8,...
        let m = MultiplicitySeq::new(fin(&[0, 2]), Tail::Periodic(vec![Finite(0), Finite(1)]));
        assert_eq!(m.nth_support(1), Some(2));
        assert_eq!(m.nth_support(2), Some(4));
        assert_eq!(m.nth_support(5), Some(10));
        assert_eq!(MultiplicitySeq::cyclic(3).nth_support(1), Some(3));
        assert_eq!(MultiplicitySeq::cyclic(3).nth_support(2), None);
    }

    #[test]
    fn masking_keeps_residue_classes_of_support_positions() {
        let ones = MultiplicitySeq::all_ones();
        // Positions of dyadic valuation 0: odd support ranks, here odd i.
        let part0 = ones.mask_support_mod(2, 1);
        for i in 1..=16 {
            let want = if i % 2 == 1 { Finite(1) } else { Finite(0) };
            assert_eq!(part0.term(i), want, "index {i}");
        }
        // Valuation >= 2: every fourth support position.
        let tail2 = ones.mask_support_mod(4, 0);
        for i in 1..=16 {
            let want = if i % 4 == 0 { Finite(1) } else { Finite(0) };
            assert_eq!(tail2.term(i), want, "index {i}");
        }
        assert!(part0.unbounded_exponent());
        assert!(tail2.unbounded_exponent());
    }

    #[test]
    fn dyadic_parts_partition_the_support() {
        // Irregular layer: terms 3,0,aleph0,1,0,aleph0,1,0,aleph0,...
        let m = MultiplicitySeq::new(
            vec![Finite(3), Finite(0), Aleph0],
            Tail::Periodic(vec![Finite(1), Finite(0), Aleph0]),
        );
        // Sum of parts 0..5 plus the valuation >= 6 tail rebuilds the layer.
        let mut sum = m.mask_support_mod(1 << 6, 0);
        for n in 0..6u32 {
            let part = m.mask_support_mod(1 << (n + 1), 1 << n);
            sum = sum.pointwise_add(&part);
        }
        assert_eq!(sum, m);
    }

    #[test]
    fn flattening_enumerates_every_factor_exactly_once() {
        // terms 2,1,0,0,... : three factors total.
        let m = MultiplicitySeq::new(fin(&[2, 1]), Tail::Zero);
        let flat: Vec<_> = (0..4).map(|i| m.flatten_nth(i)).collect();
        assert_eq!(flat, vec![Some(1), Some(1), Some(2), None]);
        assert!(m.flatten_residual(2).as_cyclic() == Some(2));
        assert!(m.flatten_residual(3).is_trivial());

        // An infinite count does not starve later support points.
        let m = MultiplicitySeq::new(vec![Aleph0, Finite(1)], Tail::Zero);
        let flat: Vec<_> = (0..5).filter_map(|i| m.flatten_nth(i)).collect();
        assert!(flat.contains(&2), "the C_{{p^2}} factor appears: {flat:?}");
    }

    #[test]
    fn flatten_residual_of_the_full_layer_removes_small_exponents_first() {
        let ones = MultiplicitySeq::all_ones();
        // Counts are all one, so the anti-diagonal walk emits exponents in
        // increasing order: 1, 2, 3, ...
        assert_eq!(ones.flatten_nth(0), Some(1));
        assert_eq!(ones.flatten_nth(3), Some(4));
        let rest = ones.flatten_residual(2);
        assert_eq!(rest.term(1), Finite(0));
        assert_eq!(rest.term(2), Finite(0));
        assert_eq!(rest.term(3), Finite(1));
        assert!(rest.unbounded_exponent());
    }

    #[test]
    fn truncation_caps_counts_and_levels() {
        let m = MultiplicitySeq::new(vec![Aleph0, Finite(0), Finite(2)], Tail::AllAleph0);
        assert_eq!(m.truncate(4, 3), vec![(1, 3), (3, 2), (4, 3)]);
        assert_eq!(m.truncate(2, 1), vec![(1, 1)]);
    }

    #[test]
    fn cartesian_descriptors_validate_their_prime() {
        assert!(CartesianDescriptor::cyclic(4, 1).is_err());
        assert!(CartesianDescriptor::cyclic(2, 1).is_ok());
        let err = CartesianDescriptor::full(1).unwrap_err();
        assert_eq!(err.to_string(), "1 is not prime");
    }

    #[test]
    fn cartesian_product_requires_matching_primes() {
        let a = CartesianDescriptor::full(2).unwrap();
        let b = CartesianDescriptor::cyclic(3, 1).unwrap();
        assert!(matches!(a.product(&b), Err(Error::MixedPrimes(2, 3))));
        let c = CartesianDescriptor::cyclic(2, 2).unwrap();
        let prod = a.product(&c).unwrap();
        assert_eq!(prod.mults().term(2), Finite(2));
    }

    #[test]
    fn primality_by_trial_division() {
        let primes: Vec<u64> = (0..=50).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
    }
}
