//! Finite abelian p-groups with explicit coordinates.
//!
//! These are the concrete witnesses the calculus materializes: direct sums
//! of cyclic p-groups with elements stored as coordinate vectors.  Sizes
//! stay small (materialization caps them), so enumeration-based checks are
//! affordable and serve as independent cross-checks for the structural
//! formulas.

pub mod character;
pub mod presentation;
pub mod snf;
pub mod subgroup;

use crate::error::Error;
use crate::multiplicity::is_prime;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

/// Enumeration guard: refuse to list groups larger than 2^16 elements.
pub const ENUMERATION_LIMIT_LOG2: u32 = 16;

/// A finite abelian p-group presented as a direct sum of cyclic groups of
/// orders `p^e` with exponents descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianPGroup {
    prime: u64,
    exponents: Vec<u32>,
}

/// An element, stored as one coordinate per cyclic summand, with
/// `coords[j]` reduced modulo `p^{e_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl FiniteAbelianPGroup {
    /// Build from a prime and cyclic exponents; zero exponents are
    /// dropped and the rest sorted descending.
    pub fn new(prime: u64, mut exponents: Vec<u32>) -> Result<Self, Error> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        exponents.retain(|&e| e > 0);
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Ok(FiniteAbelianPGroup { prime, exponents })
    }

    pub fn trivial(prime: u64) -> Result<Self, Error> {
        Self::new(prime, Vec::new())
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Cyclic exponents, descending.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Number of cyclic summands.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// The order of the cyclic summand `j` as a `u64` (each summand order
    /// must fit; the whole group order need not).
    fn summand_order(&self, j: usize) -> u64 {
        self.prime.checked_pow(self.exponents[j]).expect("summand order overflows u64")
    }

    /// The group order as a big integer.
    pub fn order(&self) -> BigInt {
        let mut n = BigInt::one();
        for &e in &self.exponents {
            n *= BigInt::from(self.prime).pow(e);
        }
        n
    }

    /// log_p of the group order.
    pub fn order_log_p(&self) -> u64 {
        self.exponents.iter().map(|&e| e as u64).sum()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.exponents.len()] }
    }

    /// Build an element from possibly unreduced signed coordinates.
    pub fn element_from_bigints(&self, coords: &[BigInt]) -> GroupElement {
        assert_eq!(coords.len(), self.exponents.len(), "coordinate count mismatch");
        let reduced = coords
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let m = BigInt::from(self.summand_order(j));
                let r = ((c % &m) + &m) % &m;
                r.to_u64().expect("reduced coordinate fits u64")
            })
            .collect();
        GroupElement { coords: reduced }
    }

    /// Build an element from unsigned coordinates, reducing each.
    pub fn element(&self, coords: &[u64]) -> GroupElement {
        assert_eq!(coords.len(), self.exponents.len(), "coordinate count mismatch");
        let reduced =
            coords.iter().enumerate().map(|(j, &c)| c % self.summand_order(j)).collect();
        GroupElement { coords: reduced }
    }

    /// The standard generator of summand `j`.
    pub fn generator(&self, j: usize) -> GroupElement {
        let mut coords = vec![0; self.exponents.len()];
        coords[j] = 1;
        GroupElement { coords }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .enumerate()
            .map(|(j, (&x, &y))| {
                let m = self.summand_order(j);
                // Coordinates are reduced, so the sum fits in u128.
                ((x as u128 + y as u128) % m as u128) as u64
            })
            .collect();
        GroupElement { coords }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .enumerate()
            .map(|(j, &x)| if x == 0 { 0 } else { self.summand_order(j) - x })
            .collect();
        GroupElement { coords }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// Scalar multiple `n * a` for a nonnegative scalar.
    pub fn scalar_mul(&self, n: u64, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let m = self.summand_order(j) as u128;
                ((n as u128 % m) * (x as u128 % m) % m) as u64
            })
            .collect();
        GroupElement { coords }
    }

    /// Scalar multiple with a big-integer scalar.
    pub fn scalar_mul_bigint(&self, n: &BigInt, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let m = BigInt::from(self.summand_order(j));
                let r = ((n * BigInt::from(x)) % &m + &m) % &m;
                r.to_u64().expect("reduced coordinate fits u64")
            })
            .collect();
        GroupElement { coords }
    }

    /// The order of an element: the least `p^k` with `p^k * a = 0`.
    pub fn element_order_exp(&self, a: &GroupElement) -> u32 {
        a.coords
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                if x == 0 {
                    return 0;
                }
                // ord(x mod p^e) = p^{e - v_p(x)}.
                let mut v = 0;
                let mut x = x;
                while x % self.prime == 0 {
                    x /= self.prime;
                    v += 1;
                }
                self.exponents[j] - v
            })
            .max()
            .unwrap_or(0)
    }

    /// All group elements, in lexicographic coordinate order.
    ///
    /// Errors when the order exceeds the enumeration guard.
    pub fn enumerate(&self) -> Result<Vec<GroupElement>, Error> {
        if self.order_log_p() as f64 * (self.prime as f64).log2()
            > ENUMERATION_LIMIT_LOG2 as f64 + 1e-9
        {
            let order = self
                .order()
                .to_u128()
                .unwrap_or(u128::MAX);
            return Err(Error::OracleSizeLimit { order, limit_log2: ENUMERATION_LIMIT_LOG2 });
        }
        let mut out = vec![self.zero()];
        for j in 0..self.exponents.len() {
            let m = self.summand_order(j);
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for e in &out {
                for v in 0..m {
                    let mut coords = e.coords.clone();
                    coords[j] = v;
                    next.push(GroupElement { coords });
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// The direct sum of several groups over one prime, with the embedding
    /// of each part's coordinates into the sum.
    ///
    /// The sum is renormalized (exponents descending), so embeddings track
    /// where each part's summands land.
    pub fn direct_sum(parts: &[FiniteAbelianPGroup]) -> Result<(FiniteAbelianPGroup, Vec<Embedding>), Error> {
        let Some(first) = parts.first() else {
            return Err(Error::Construction("direct sum of no parts".into()));
        };
        let prime = first.prime;
        for part in parts {
            if part.prime != prime {
                return Err(Error::MixedPrimes(prime, part.prime));
            }
        }
        // Tag each summand with its (part, index-in-part), sort descending
        // by exponent with a stable order.
        let mut tagged: Vec<(u32, usize, usize)> = Vec::new();
        for (pi, part) in parts.iter().enumerate() {
            for (j, &e) in part.exponents.iter().enumerate() {
                tagged.push((e, pi, j));
            }
        }
        tagged.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let exponents: Vec<u32> = tagged.iter().map(|&(e, _, _)| e).collect();
        let sum = FiniteAbelianPGroup { prime, exponents };
        let mut embeddings: Vec<Embedding> =
            parts.iter().map(|p| Embedding { positions: vec![0; p.rank()] }).collect();
        for (slot, &(_, pi, j)) in tagged.iter().enumerate() {
            embeddings[pi].positions[j] = slot;
        }
        Ok((sum, embeddings))
    }
}

/// Where each summand of a direct-sum part lands in the sum.
#[derive(Debug, Clone)]
pub struct Embedding {
    positions: Vec<usize>,
}

impl Embedding {
    /// Map a part element to its image in the sum.
    pub fn apply(&self, sum: &FiniteAbelianPGroup, part_elem: &GroupElement) -> GroupElement {
        let mut coords = vec![0; sum.rank()];
        for (j, &slot) in self.positions.iter().enumerate() {
            coords[slot] = part_elem.coords[j];
        }
        GroupElement { coords }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }
}

/// Decompose a finite abelian p-group given as a closed set of elements,
/// by order counting alone: with `s_i = log_p #{g : p^i g = 0}`, the count
/// of summands of order exactly `p^i` is `(s_i - s_{i-1}) - (s_{i+1} - s_i)`
/// shifted appropriately.  Returns cyclic exponents, descending.
///
/// This is independent of any matrix reduction and serves as an oracle.
pub fn decomposition_by_order_counting(
    ambient: &FiniteAbelianPGroup,
    elements: &[GroupElement],
) -> Vec<u32> {
    let max_e = elements.iter().map(|g| ambient.element_order_exp(g)).max().unwrap_or(0);
    // s[i] = log_p of the number of elements killed by p^i.
    let mut s = vec![0u32; max_e as usize + 2];
    for i in 0..=max_e + 1 {
        let pk = BigInt::from(ambient.prime).pow(i);
        let count = elements
            .iter()
            .filter(|g| ambient.scalar_mul_bigint(&pk, g).coords.iter().all(|&c| c == 0))
            .count();
        let mut log = 0u32;
        let mut n = count as u128;
        while n > 1 {
            debug_assert_eq!(n % ambient.prime as u128, 0, "subgroup size not a p-power");
            n /= ambient.prime as u128;
            log += 1;
        }
        s[i as usize] = log;
    }
    // c[i] = number of summands with exponent >= i.
    let c: Vec<u32> = (1..=max_e as usize + 1).map(|i| s[i] - s[i - 1]).collect();
    let mut exponents = Vec::new();
    for i in (1..=max_e as usize).rev() {
        let here = c[i - 1] - c.get(i).copied().unwrap_or(0);
        for _ in 0..here {
            exponents.push(i as u32);
        }
    }
    exponents
}

/// Ulm multiplicities of a finite abelian p-group, computed by enumeration:
/// the dimension counts of the layered kernels `G[p^i]` against `pG`.
///
/// With `d_i = log_p(|G[p^i]| / |pG ∩ G[p^i]|)`, the multiplicity of the
/// cyclic summand `C_{p^i}` is `d_i - d_{i-1}`.  Returns pairs
/// `(exponent, multiplicity)` for nonzero multiplicities, ascending.
pub fn ulm_multiplicities(g: &FiniteAbelianPGroup) -> Result<Vec<(u32, u64)>, Error> {
    let elements = g.enumerate()?;
    let p_g: std::collections::HashSet<GroupElement> =
        elements.iter().map(|e| g.scalar_mul(g.prime(), e)).collect();
    let max_e = g.exponents.first().copied().unwrap_or(0);
    let mut d = vec![0u64; max_e as usize + 1];
    for i in 1..=max_e {
        let pk = BigInt::from(g.prime()).pow(i);
        let torsion: Vec<&GroupElement> = elements
            .iter()
            .filter(|e| g.scalar_mul_bigint(&pk, e).coords.iter().all(|&c| c == 0))
            .collect();
        let inter = torsion.iter().filter(|e| p_g.contains(**e)).count();
        let ratio = torsion.len() as u128 / inter as u128;
        let mut log = 0u64;
        let mut n = ratio;
        while n > 1 {
            debug_assert_eq!(n % g.prime() as u128, 0);
            n /= g.prime() as u128;
            log += 1;
        }
        d[i as usize] = log;
    }
    let mut out = Vec::new();
    for i in 1..=max_e as usize {
        let alpha = d[i] - d[i - 1];
        if alpha > 0 {
            out.push((i as u32, alpha));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g_2_8() -> FiniteAbelianPGroup {
        // C_8 + C_2, so coordinate 0 ranges over Z/8 and coordinate 1 over Z/2.
        FiniteAbelianPGroup::new(2, vec![1, 3]).unwrap()
    }

    #[test]
    fn construction_normalizes_exponents() {
        let g = FiniteAbelianPGroup::new(3, vec![0, 2, 1, 2]).unwrap();
        assert_eq!(g.exponents(), &[2, 2, 1]);
        assert_eq!(g.order(), BigInt::from(243));
        assert_eq!(g.order_log_p(), 5);
        assert_eq!(FiniteAbelianPGroup::new(9, vec![1]).unwrap_err(), Error::NotPrime(9));
    }

    #[test]
    fn arithmetic_in_coordinates() {
        let g = g_2_8();
        let a = g.element(&[5, 1]);
        let b = g.element(&[7, 1]);
        assert_eq!(g.add(&a, &b), g.element(&[4, 0]));
        assert_eq!(g.sub(&a, &a), g.zero());
        assert_eq!(g.neg(&a), g.element(&[3, 1]));
        assert_eq!(g.scalar_mul(6, &a), g.element(&[6, 0]));
        assert_eq!(g.scalar_mul_bigint(&BigInt::from(-1), &a), g.neg(&a));
        assert_eq!(g.element_from_bigints(&[BigInt::from(21), BigInt::from(-3)]), g.element(&[5, 1]));
    }

    #[test]
    fn element_orders() {
        let g = g_2_8();
        assert_eq!(g.element_order_exp(&g.zero()), 0);
        assert_eq!(g.element_order_exp(&g.element(&[0, 1])), 1);
        assert_eq!(g.element_order_exp(&g.element(&[1, 0])), 3);
        assert_eq!(g.element_order_exp(&g.element(&[4, 0])), 1);
        assert_eq!(g.element_order_exp(&g.element(&[2, 1])), 2);
    }

    #[test]
    fn enumeration_lists_each_element_once() {
        let g = g_2_8();
        let all = g.enumerate().unwrap();
        assert_eq!(all.len(), 16);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 16);
        // The guard refuses oversized groups.
        let big = FiniteAbelianPGroup::new(2, vec![17]).unwrap();
        let err = big.enumerate().unwrap_err();
        assert!(err.to_string().contains("oracle size limit"));
    }

    #[test]
    fn order_counting_recovers_the_decomposition() {
        for exps in [vec![3, 1], vec![2, 2, 1], vec![1], vec![4]] {
            let g = FiniteAbelianPGroup::new(2, exps.clone()).unwrap();
            let all = g.enumerate().unwrap();
            assert_eq!(decomposition_by_order_counting(&g, &all), exps);
        }
        let g3 = FiniteAbelianPGroup::new(3, vec![2, 1, 1]).unwrap();
        let all = g3.enumerate().unwrap();
        assert_eq!(decomposition_by_order_counting(&g3, &all), vec![2, 1, 1]);
    }

    #[test]
    fn ulm_multiplicities_match_the_summand_counts() {
        let g = g_2_8();
        assert_eq!(ulm_multiplicities(&g).unwrap(), vec![(1, 1), (3, 1)]);
        let h = FiniteAbelianPGroup::new(3, vec![2, 2, 1]).unwrap();
        assert_eq!(ulm_multiplicities(&h).unwrap(), vec![(1, 1), (2, 2)]);
        let t = FiniteAbelianPGroup::trivial(5).unwrap();
        assert_eq!(ulm_multiplicities(&t).unwrap(), vec![]);
    }

    #[test]
    fn direct_sum_tracks_embeddings() {
        let a = FiniteAbelianPGroup::new(2, vec![1]).unwrap();
        let b = FiniteAbelianPGroup::new(2, vec![3, 2]).unwrap();
        let (sum, embs) = FiniteAbelianPGroup::direct_sum(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(sum.exponents(), &[3, 2, 1]);
        let ea = embs[0].apply(&sum, &a.element(&[1]));
        let eb = embs[1].apply(&sum, &b.element(&[5, 1]));
        assert_eq!(ea, sum.element(&[0, 0, 1]));
        assert_eq!(eb, sum.element(&[5, 1, 0]));
        // Embedded elements add independently.
        assert_eq!(sum.add(&ea, &eb), sum.element(&[5, 1, 1]));
        let err = FiniteAbelianPGroup::direct_sum(&[
            a,
            FiniteAbelianPGroup::new(3, vec![1]).unwrap(),
        ])
        .unwrap_err();
        assert_eq!(err, Error::MixedPrimes(2, 3));
    }
}
