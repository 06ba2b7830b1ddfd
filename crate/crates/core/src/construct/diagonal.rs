//! Diagonal elements for cyclic extensions.
//!
//! A cyclic extension adjoins one generator `x` with `p^r x = delta`, where
//! `delta` is a diagonal element of the base group: a sum of unit multiples of
//! the designated top-layer generators.  For the extension to add a genuinely
//! new final layer, `delta` must be deep — at truncation level `l` it must lie
//! outside `pH + H[p^(l-1)]`.
//!
//! The same section defines the shift-difference map `theta` on truncated
//! towers: on `C_{p^(n+1)} x C_{p^n} x ... x C_p` it sends `(x_i)` to
//! `(x_i - x_(i+1) mod p^i)`, dropping the deepest coordinate.  Its kernel is
//! generated by the all-ones diagonal, which is the finite shadow of the
//! element a limit extension's diagonal approximates.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::finite::presentation::group_from_presentation;
use crate::finite::subgroup::{contains, power_subgroup_gens, torsion_subgroup_gens};
use crate::finite::{FiniteAbelianPGroup, GroupElement};

/// Which unit multiple of each top-layer generator enters the diagonal.
///
/// `default_unit` applies to every top generator; `overrides` replaces the
/// unit at individual positions (indexed in the order the top generators are
/// listed).  Units are taken modulo the prime and must stay coprime to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalSpec {
    pub default_unit: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<(u64, u64)>,
}

impl Default for DiagonalSpec {
    fn default() -> Self {
        DiagonalSpec { default_unit: 1, overrides: Vec::new() }
    }
}

impl DiagonalSpec {
    /// The unit attached to the `index`-th top generator.
    pub fn unit_for(&self, index: u64) -> u64 {
        self.overrides
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, u)| *u)
            .unwrap_or(self.default_unit)
    }

    /// Check every unit that can occur is coprime to `p`.
    pub fn validate(&self, prime: u64) -> Result<(), Error> {
        let mut units: Vec<u64> = self.overrides.iter().map(|(_, u)| *u).collect();
        units.push(self.default_unit);
        for u in units {
            if u % prime == 0 {
                return Err(Error::Construction(format!(
                    "diagonal unit {u} is divisible by {prime}"
                )));
            }
        }
        Ok(())
    }

    /// Assemble the diagonal element from the listed top generators.
    pub fn element(
        &self,
        group: &FiniteAbelianPGroup,
        tops: &[GroupElement],
    ) -> Result<GroupElement, Error> {
        self.validate(group.prime())?;
        let mut delta = group.zero();
        for (i, g) in tops.iter().enumerate() {
            delta = group.add(&delta, &group.scalar_mul(self.unit_for(i as u64), g));
        }
        Ok(delta)
    }
}

/// Decide whether `delta` lies outside `pH + H[p^(level-1)]`.
///
/// This is the depth condition a diagonal must satisfy at truncation level
/// `level` for the extension to contribute a new final layer there.
pub fn check_delta_condition(
    group: &FiniteAbelianPGroup,
    delta: &GroupElement,
    level: u32,
) -> Result<bool, Error> {
    assert!(level >= 1, "the depth condition starts at level 1");
    let mut gens = power_subgroup_gens(group, &BigInt::from(group.prime()));
    gens.extend(torsion_subgroup_gens(group, level - 1));
    Ok(!contains(group, &gens, delta))
}

/// The shift-difference map between truncated towers.
pub struct ThetaMap {
    prime: u64,
    depth: u32,
    domain: FiniteAbelianPGroup,
    codomain: FiniteAbelianPGroup,
}

/// Build the shift-difference map on the tower truncated at `n`:
/// domain `C_{p^(n+1)} x ... x C_p`, codomain `C_{p^n} x ... x C_p`.
pub fn theta_truncated(prime: u64, n: u32) -> Result<ThetaMap, Error> {
    assert!(n >= 1, "the truncated tower needs at least two stages");
    let domain = FiniteAbelianPGroup::new(prime, (1..=n + 1).rev().collect())?;
    let codomain = FiniteAbelianPGroup::new(prime, (1..=n).rev().collect())?;
    Ok(ThetaMap { prime, depth: n, domain, codomain })
}

impl ThetaMap {
    pub fn domain(&self) -> &FiniteAbelianPGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteAbelianPGroup {
        &self.codomain
    }

    /// Coordinate with exponent `e` in a descending-exponent coordinate list.
    fn coord_of_exp(top: u32, e: u32) -> usize {
        (top - e) as usize
    }

    /// Apply the map: `(x_i) -> (x_i - x_(i+1) mod p^i)` for `i <= n`.
    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        let n = self.depth;
        let coords: Vec<BigInt> = (1..=n)
            .rev()
            .map(|i| {
                let xi = x.coords()[Self::coord_of_exp(n + 1, i)];
                let xi1 = x.coords()[Self::coord_of_exp(n + 1, i + 1)];
                BigInt::from(xi) - BigInt::from(xi1)
            })
            .collect();
        self.codomain.element_from_bigints(&coords)
    }

    /// The all-ones diagonal of the domain.
    pub fn eta(&self) -> GroupElement {
        self.domain.element(&vec![1; (self.depth + 1) as usize])
    }

    /// Matrix rows presenting the cokernel: the codomain's relations plus the
    /// images of the domain generators.
    fn cokernel_rows(&self) -> Vec<Vec<BigInt>> {
        let n = self.depth;
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (j, e) in self.codomain.exponents().iter().enumerate() {
            let mut row = vec![BigInt::from(0); n as usize];
            row[j] = BigInt::from(self.prime).pow(*e);
            rows.push(row);
        }
        for gen_exp in 1..=n + 1 {
            let image = self.apply(&self.domain.generator(Self::coord_of_exp(n + 1, gen_exp)));
            rows.push(image.coords().iter().map(|&c| BigInt::from(c)).collect());
        }
        rows
    }

    /// Whether the map hits every element of the codomain.
    pub fn is_surjective(&self) -> Result<bool, Error> {
        if self.depth == 0 {
            return Ok(true);
        }
        let presented =
            group_from_presentation(self.prime, self.depth as usize, &self.cokernel_rows())?;
        Ok(presented.group().rank() == 0)
    }

    /// The kernel order, computed as `|domain| / |image|` with
    /// `|image| = |codomain| / |cokernel|`.
    pub fn kernel_order(&self) -> Result<BigInt, Error> {
        let cokernel: BigInt = if self.depth == 0 {
            BigInt::one()
        } else {
            group_from_presentation(self.prime, self.depth as usize, &self.cokernel_rows())?
                .group()
                .order()
        };
        Ok(self.domain.order() * cokernel / self.codomain.order())
    }
}
