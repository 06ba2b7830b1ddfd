//! Characters of finite abelian p-groups.
//!
//! A character of `G = sum C_{p^{e_j}}` takes values in `Z/p^{e_1}` (the
//! common modulus), sending the generator of summand `j` to a multiple of
//! `p^{e_1 - e_j}`.  The characters form a group isomorphic to `G`; here
//! they are listed explicitly and compared by evaluation, which keeps every
//! duality statement checkable element by element.

use crate::error::Error;
use crate::finite::{FiniteAbelianPGroup, GroupElement};

/// A character, stored by its values on the standard generators, all in
/// the common modulus `p^{modulus_exp}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    modulus: u64,
    values: Vec<u64>,
}

impl Character {
    /// Evaluate at a group element, in `Z/p^{e_1}`.
    pub fn eval(&self, elem: &GroupElement) -> u64 {
        elem.coords()
            .iter()
            .zip(&self.values)
            .fold(0u64, |acc, (&c, &v)| {
                ((acc as u128 + c as u128 * v as u128) % self.modulus as u128) as u64
            })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Pointwise sum of two characters.
    pub fn add(&self, other: &Character) -> Character {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| ((a as u128 + b as u128) % self.modulus as u128) as u64)
            .collect();
        Character { modulus: self.modulus, values }
    }

    /// The scalar multiple `n * self`.
    pub fn scale(&self, n: u64) -> Character {
        let values = self
            .values
            .iter()
            .map(|&v| ((n as u128 * v as u128) % self.modulus as u128) as u64)
            .collect();
        Character { modulus: self.modulus, values }
    }
}

/// The full character group, listed explicitly.
///
/// Errors when the group exceeds the enumeration guard.
pub fn characters(g: &FiniteAbelianPGroup) -> Result<Vec<Character>, Error> {
    // The character list has |G| entries, so reuse the element enumeration
    // guard by enumerating coordinate tuples the same way.
    let tuples = g.enumerate()?;
    let e1 = g.exponents().first().copied().unwrap_or(0);
    let modulus = g.prime().checked_pow(e1).expect("modulus fits u64");
    Ok(tuples
        .into_iter()
        .map(|t| {
            let values = t
                .coords()
                .iter()
                .enumerate()
                .map(|(j, &tj)| {
                    let step = g.prime().pow(e1 - g.exponents()[j]);
                    ((tj as u128 * step as u128) % modulus as u128) as u64
                })
                .collect();
            Character { modulus, values }
        })
        .collect())
}

/// View a character as an element of the ambient group `(Z/p^{e_1})^r`,
/// which makes the order-counting decomposition oracle applicable to sets
/// of characters.
pub fn character_ambient(g: &FiniteAbelianPGroup) -> Result<FiniteAbelianPGroup, Error> {
    let e1 = g.exponents().first().copied().unwrap_or(0);
    FiniteAbelianPGroup::new(g.prime(), vec![e1; g.rank()])
}

/// The character, seen as coordinates in `character_ambient`.
pub fn character_as_element(
    ambient: &FiniteAbelianPGroup,
    chi: &Character,
) -> GroupElement {
    ambient.element(chi.values())
}

/// All characters vanishing on every element of `subset`.
pub fn annihilator(chars: &[Character], subset: &[GroupElement]) -> Vec<Character> {
    chars
        .iter()
        .filter(|chi| subset.iter().all(|e| chi.eval(e) == 0))
        .cloned()
        .collect()
}

/// The set `{n * chi}` over all given characters, sorted and deduplicated.
pub fn scaled_characters(chars: &[Character], n: u64) -> Vec<Character> {
    let mut out: Vec<Character> = chars.iter().map(|chi| chi.scale(n)).collect();
    out.sort();
    out.dedup();
    out
}

/// The evaluation map into the double dual.
///
/// An element of the double dual is a character of the character group;
/// here it is recorded by its values on every character of the original
/// group, in the canonical order of [`characters`].  The map sends `g` to
/// evaluation-at-`g`; it is a bijective homomorphism onto the double dual.
pub struct DoubleDualMap {
    chars: Vec<Character>,
    modulus: u64,
}

/// Build the evaluation map for `g`'s group.
///
/// Errors when the group exceeds the enumeration guard.
pub fn double_dual_map(g: &FiniteAbelianPGroup) -> Result<DoubleDualMap, Error> {
    let e1 = g.exponents().first().copied().unwrap_or(0);
    let modulus = g.prime().checked_pow(e1).expect("modulus fits u64");
    Ok(DoubleDualMap { chars: characters(g)?, modulus })
}

impl DoubleDualMap {
    /// Evaluation-at-`elem`: its value on every character, in order.
    pub fn apply(&self, elem: &GroupElement) -> Vec<u64> {
        self.chars.iter().map(|chi| chi.eval(elem)).collect()
    }

    /// The characters the map evaluates against, in canonical order.
    pub fn characters(&self) -> &[Character] {
        &self.chars
    }

    /// The common value modulus `p^{e_1}`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}
