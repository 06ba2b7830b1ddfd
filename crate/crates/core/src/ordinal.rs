//! Ordinals below omega^omega in Cantor normal form.
//!
//! Torsion sequences of countably based groups are indexed by ordinals, and
//! every order type this crate manipulates is a finite sum of copies of
//! omega and a finite remainder, so restricting to Cantor normal forms with
//! finite exponents loses nothing while keeping every operation decidable.

use crate::error::Error;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// An ordinal `sum_k omega^{e_k} * c_k` with strictly decreasing exponents
/// and positive coefficients.  The empty sum is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawOrdinal", into = "RawOrdinal")]
pub struct OrdinalCNF {
    /// `(exponent, coefficient)` pairs, highest exponent first.
    terms: Vec<(u32, u64)>,
}

#[derive(Serialize, Deserialize)]
struct RawOrdinal {
    terms: Vec<(u32, u64)>,
}

impl From<RawOrdinal> for OrdinalCNF {
    fn from(raw: RawOrdinal) -> Self {
        OrdinalCNF::from_terms(raw.terms)
    }
}

impl From<OrdinalCNF> for RawOrdinal {
    fn from(o: OrdinalCNF) -> Self {
        RawOrdinal { terms: o.terms }
    }
}

impl OrdinalCNF {
    /// The ordinal zero.
    pub fn zero() -> Self {
        OrdinalCNF { terms: Vec::new() }
    }

    /// A finite ordinal.
    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            OrdinalCNF { terms: vec![(0, n)] }
        }
    }

    /// The ordinal omega.
    pub fn omega() -> Self {
        OrdinalCNF { terms: vec![(1, 1)] }
    }

    /// `omega^exp * coeff` as a single-term ordinal (zero when `coeff` is 0).
    pub fn monomial(exp: u32, coeff: u64) -> Self {
        if coeff == 0 {
            Self::zero()
        } else {
            OrdinalCNF { terms: vec![(exp, coeff)] }
        }
    }

    /// Build from arbitrary `(exponent, coefficient)` pairs: terms are merged,
    /// zero coefficients dropped, and exponents sorted descending.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Self {
        let mut sorted: Vec<(u32, u64)> = Vec::new();
        let mut terms = terms;
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        for (e, c) in terms {
            if c == 0 {
                continue;
            }
            match sorted.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => sorted.push((e, c)),
            }
        }
        OrdinalCNF { terms: sorted }
    }

    /// The normal-form terms, highest exponent first.
    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    /// True for the ordinal zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The finite value, when the ordinal is finite.
    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, n)] => Some(*n),
            _ => None,
        }
    }

    /// True for limit ordinals (nonzero with no finite summand).
    pub fn is_limit(&self) -> bool {
        match self.terms.last() {
            None => false,
            Some((e, _)) => *e >= 1,
        }
    }

    /// True for successor ordinals.
    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some((0, _)))
    }

    /// The ordinal plus one.
    pub fn successor(&self) -> Self {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) => *c += 1,
            _ => terms.push((0, 1)),
        }
        OrdinalCNF { terms }
    }

    /// The immediate predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Self> {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) => {
                if *c == 1 {
                    terms.pop();
                } else {
                    *c -= 1;
                }
                Some(OrdinalCNF { terms })
            }
            _ => None,
        }
    }

    /// Ordinal addition (non-commutative: lower terms of the left operand are
    /// absorbed by the leading term of the right operand).
    pub fn add(&self, rhs: &OrdinalCNF) -> Self {
        let Some(&(lead, _)) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(u32, u64)> = self
            .terms
            .iter()
            .copied()
            .filter(|&(e, _)| e > lead)
            .collect();
        let mut rhs_terms = rhs.terms.clone();
        if let Some(&(e, c)) = self.terms.iter().find(|&&(e, _)| e == lead) {
            rhs_terms[0].1 += c;
            let _ = e;
        }
        terms.extend(rhs_terms);
        OrdinalCNF { terms }
    }

    /// Left subtraction: the unique `gamma` with `self + gamma = target`,
    /// or `None` when `target < self`.
    pub fn left_subtract(&self, target: &OrdinalCNF) -> Option<OrdinalCNF> {
        if target < self {
            return None;
        }
        let mut a = self.terms.as_slice();
        let mut b = target.terms.as_slice();
        loop {
            match (a.first(), b.first()) {
                (None, _) => return Some(OrdinalCNF { terms: b.to_vec() }),
                (Some(_), None) => unreachable!("target >= self"),
                (Some(&(ea, ca)), Some(&(eb, cb))) => {
                    if eb > ea {
                        return Some(OrdinalCNF { terms: b.to_vec() });
                    }
                    debug_assert_eq!(ea, eb, "target >= self forces matching leads");
                    match cb.cmp(&ca) {
                        Ordering::Greater => {
                            let mut terms = vec![(eb, cb - ca)];
                            terms.extend_from_slice(&b[1..]);
                            return Some(OrdinalCNF { terms });
                        }
                        Ordering::Equal => {
                            a = &a[1..];
                            b = &b[1..];
                        }
                        Ordering::Less => unreachable!("target >= self"),
                    }
                }
            }
        }
    }

    /// The canonical fundamental sequence of a limit ordinal: writing the
    /// ordinal as `beta + omega^e` (splitting one copy off the last term),
    /// the n-th approximant is `beta + omega^{e-1} * n` for n = 1, 2, 3, ...
    ///
    /// Errors on zero and on successors.
    pub fn fundamental_sequence(&self) -> Result<FundamentalSequence, Error> {
        if !self.is_limit() {
            return Err(Error::NotALimitOrdinal(self.to_string()));
        }
        let &(e, c) = self.terms.last().expect("limit ordinal is nonzero");
        let mut base = self.terms.clone();
        base.pop();
        if c > 1 {
            base.push((e, c - 1));
        }
        Ok(FundamentalSequence {
            base: OrdinalCNF { terms: base },
            step_exp: e - 1,
            next_n: 1,
        })
    }

    /// The n-th approximant (1-based) of the fundamental sequence.
    pub fn fundamental_term(&self, n: u64) -> Result<OrdinalCNF, Error> {
        let mut fs = self.fundamental_sequence()?;
        fs.next_n = n;
        Ok(fs.next().expect("fundamental sequences are infinite"))
    }
}

/// Lazy enumeration of a limit ordinal's canonical fundamental sequence.
#[derive(Debug, Clone)]
pub struct FundamentalSequence {
    base: OrdinalCNF,
    step_exp: u32,
    next_n: u64,
}

impl Iterator for FundamentalSequence {
    type Item = OrdinalCNF;

    fn next(&mut self) -> Option<OrdinalCNF> {
        let n = self.next_n;
        self.next_n += 1;
        Some(self.base.add(&OrdinalCNF::monomial(self.step_exp, n)))
    }
}

impl PartialOrd for OrdinalCNF {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdinalCNF {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl fmt::Display for OrdinalCNF {
    /// Renders in the CLI ordinal syntax, e.g. `w^2*3+w*1+4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(e, c) in &self.terms {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "w*{c}")?,
                _ => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(terms: &[(u32, u64)]) -> OrdinalCNF {
        OrdinalCNF::from_terms(terms.to_vec())
    }

    #[test]
    fn comparison_is_lexicographic_on_normal_forms() {
        let w = OrdinalCNF::omega();
        let w2 = OrdinalCNF::monomial(2, 1);
        assert!(OrdinalCNF::finite(5) < w);
        assert!(w < ord(&[(1, 1), (0, 1)])); // w < w+1
        assert!(ord(&[(1, 2)]) < w2); // w*2 < w^2
        assert!(ord(&[(2, 1)]) < ord(&[(2, 1), (0, 3)])); // w^2 < w^2+3
        assert_eq!(ord(&[(1, 1), (0, 2)]).cmp(&ord(&[(1, 1), (0, 2)])), Ordering::Equal);
    }

    #[test]
    fn addition_absorbs_lower_terms_on_the_left() {
        let w = OrdinalCNF::omega();
        // 3 + w = w
        assert_eq!(OrdinalCNF::finite(3).add(&w), w);
        // w + 3 = w+3
        assert_eq!(w.add(&OrdinalCNF::finite(3)), ord(&[(1, 1), (0, 3)]));
        // (w+2) + w = w*2
        assert_eq!(ord(&[(1, 1), (0, 2)]).add(&w), ord(&[(1, 2)]));
        // (w+1) + (w+1) = w*2+1
        let w1 = ord(&[(1, 1), (0, 1)]);
        assert_eq!(w1.add(&w1), ord(&[(1, 2), (0, 1)]));
    }

    #[test]
    fn left_subtraction_inverts_addition() {
        let samples = [
            OrdinalCNF::zero(),
            OrdinalCNF::finite(4),
            OrdinalCNF::omega(),
            ord(&[(1, 2), (0, 3)]),
            ord(&[(2, 1), (1, 1)]),
        ];
        for a in &samples {
            for b in &samples {
                let sum = a.add(b);
                let gamma = a.left_subtract(&sum).expect("sum >= a");
                assert_eq!(a.add(&gamma), sum, "a={a} b={b}");
            }
        }
        // w cannot be subtracted from 3
        assert_eq!(OrdinalCNF::omega().left_subtract(&OrdinalCNF::finite(3)), None);
    }

    #[test]
    fn successors_and_limits_are_classified() {
        assert!(!OrdinalCNF::zero().is_limit());
        assert!(!OrdinalCNF::zero().is_successor());
        assert!(OrdinalCNF::finite(1).is_successor());
        assert!(OrdinalCNF::omega().is_limit());
        assert!(ord(&[(1, 1), (0, 2)]).is_successor());
        assert_eq!(
            ord(&[(1, 1), (0, 1)]).predecessor(),
            Some(OrdinalCNF::omega())
        );
        assert_eq!(OrdinalCNF::omega().predecessor(), None);
    }

    #[test]
    fn fundamental_sequence_of_omega_counts_upward() {
        let fs: Vec<_> = OrdinalCNF::omega()
            .fundamental_sequence()
            .unwrap()
            .take(3)
            .collect();
        assert_eq!(
            fs,
            vec![OrdinalCNF::finite(1), OrdinalCNF::finite(2), OrdinalCNF::finite(3)]
        );
    }

    #[test]
    fn fundamental_sequence_of_omega_times_two_passes_through_omega() {
        let fs: Vec<_> = ord(&[(1, 2)]).fundamental_sequence().unwrap().take(3).collect();
        assert_eq!(
            fs,
            vec![
                ord(&[(1, 1), (0, 1)]),
                ord(&[(1, 1), (0, 2)]),
                ord(&[(1, 1), (0, 3)])
            ]
        );
    }

    #[test]
    fn fundamental_sequence_rejects_non_limits() {
        let err = OrdinalCNF::finite(3).fundamental_sequence().unwrap_err();
        assert!(err.to_string().contains("not a limit ordinal"));
        let err = OrdinalCNF::zero().fundamental_sequence().unwrap_err();
        assert!(err.to_string().contains("not a limit ordinal"));
    }

    #[test]
    fn fundamental_sequence_of_omega_squared_steps_by_omega() {
        let fs: Vec<_> = ord(&[(2, 1)]).fundamental_sequence().unwrap().take(3).collect();
        assert_eq!(fs, vec![ord(&[(1, 1)]), ord(&[(1, 2)]), ord(&[(1, 3)])]);
    }

    #[test]
    fn display_matches_the_cli_ordinal_syntax() {
        assert_eq!(OrdinalCNF::zero().to_string(), "0");
        assert_eq!(OrdinalCNF::finite(4).to_string(), "4");
        assert_eq!(ord(&[(2, 3), (1, 1), (0, 4)]).to_string(), "w^2*3+w*1+4");
    }
}
