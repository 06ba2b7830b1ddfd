//! Subgroups of concrete finite p-groups.
//!
//! Subgroups are handled through generating sets.  Closure enumerates the
//! generated subgroup (guarded), membership solves an integer linear
//! system, and the power and torsion subgroups come with their standard
//! generating sets.

use crate::error::Error;
use crate::finite::snf::{solve, Matrix};
use crate::finite::{FiniteAbelianPGroup, GroupElement, ENUMERATION_LIMIT_LOG2};
use num_bigint::BigInt;
use std::collections::BTreeSet;

/// All elements of the subgroup generated by `gens`, sorted.
///
/// Errors when the closure would exceed the enumeration guard.
pub fn closure(
    g: &FiniteAbelianPGroup,
    gens: &[GroupElement],
) -> Result<Vec<GroupElement>, Error> {
    let limit = 1usize << ENUMERATION_LIMIT_LOG2;
    let mut seen: BTreeSet<GroupElement> = BTreeSet::new();
    seen.insert(g.zero());
    let mut frontier: Vec<GroupElement> = vec![g.zero()];
    while let Some(e) = frontier.pop() {
        for gen in gens {
            let next = g.add(&e, gen);
            if seen.insert(next.clone()) {
                if seen.len() > limit {
                    return Err(Error::OracleSizeLimit {
                        order: seen.len() as u128,
                        limit_log2: ENUMERATION_LIMIT_LOG2,
                    });
                }
                frontier.push(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Does the subgroup generated by `gens` contain `target`?
///
/// Solves `sum_k x_k gen_k = target` modulo the cyclic orders as one
/// integer linear system, so it works on groups too large to enumerate.
pub fn contains(g: &FiniteAbelianPGroup, gens: &[GroupElement], target: &GroupElement) -> bool {
    let r = g.rank();
    let s = gens.len();
    // Columns: one per generator coefficient, then one per modulus.
    let mut m = Matrix::zero(r, s + r);
    for (k, gen) in gens.iter().enumerate() {
        for j in 0..r {
            *m.at_mut(j, k) = BigInt::from(gen.coords()[j]);
        }
    }
    for j in 0..r {
        *m.at_mut(j, s + j) = BigInt::from(g.prime()).pow(g.exponents()[j]);
    }
    let b: Vec<BigInt> = target.coords().iter().map(|&c| BigInt::from(c)).collect();
    solve(&m, &b).is_some()
}

/// Generators of `n G`.
pub fn power_subgroup_gens(g: &FiniteAbelianPGroup, n: &BigInt) -> Vec<GroupElement> {
    (0..g.rank()).map(|j| g.scalar_mul_bigint(n, &g.generator(j))).collect()
}

/// Generators of the torsion subgroup `G[p^k]`.
pub fn torsion_subgroup_gens(g: &FiniteAbelianPGroup, k: u32) -> Vec<GroupElement> {
    (0..g.rank())
        .map(|j| {
            let drop = g.exponents()[j].saturating_sub(k);
            g.scalar_mul_bigint(&BigInt::from(g.prime()).pow(drop), &g.generator(j))
        })
        .collect()
}

/// Cyclic exponents of `p^k G`, by the standard formula.
pub fn power_subgroup_exponents(g: &FiniteAbelianPGroup, k: u32) -> Vec<u32> {
    g.exponents().iter().filter_map(|&e| (e > k).then(|| e - k)).collect()
}

/// Cyclic exponents of `G[p^k]`, by the standard formula.
pub fn torsion_subgroup_exponents(g: &FiniteAbelianPGroup, k: u32) -> Vec<u32> {
    let mut v: Vec<u32> = g.exponents().iter().map(|&e| e.min(k)).filter(|&e| e > 0).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}
