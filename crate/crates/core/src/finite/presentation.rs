//! Finite p-groups from generators and relations.
//!
//! A presentation is a list of relation rows over `num_generators`
//! unknowns.  The quotient of the free module by the row span is computed
//! through the Smith reduction; the result packages the canonical group
//! together with transport of coefficient vectors to group coordinates and
//! a section back.

use crate::error::Error;
use crate::finite::snf::{smith_normal_form, Matrix};
use crate::finite::{FiniteAbelianPGroup, GroupElement};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A group presented by relations, with coordinate transport.
#[derive(Debug, Clone)]
pub struct PresentedGroup {
    group: FiniteAbelianPGroup,
    right: Matrix,
    right_inv: Matrix,
    /// Pairs `(transformed coordinate, group slot)` for the coordinates
    /// that survive as cyclic summands.
    slots: Vec<(usize, usize)>,
    num_generators: usize,
}

/// Present a finite abelian p-group on `num_generators` generators subject
/// to integer relation rows.
///
/// Errors with a free-quotient report when the relations do not pin every
/// generator down to finite order.
pub fn group_from_presentation(
    prime: u64,
    num_generators: usize,
    relations: &[Vec<BigInt>],
) -> Result<PresentedGroup, Error> {
    for row in relations {
        assert_eq!(row.len(), num_generators, "relation arity mismatch");
    }
    let a = if relations.is_empty() {
        Matrix::zero(0, num_generators)
    } else {
        Matrix::from_rows(relations.to_vec())
    };
    let snf = smith_normal_form(&a);
    if snf.rank() < num_generators {
        return Err(Error::NonFinitePPart { prime });
    }
    // With full column rank the diagonal carries one entry per generator.
    let p = BigInt::from(prime);
    let mut kept: Vec<(usize, u32)> = Vec::new();
    for (j, d) in snf.diagonal.iter().enumerate() {
        let mut v = 0u32;
        let mut d = d.abs();
        while (&d % &p).is_zero() {
            d /= &p;
            v += 1;
        }
        // Any prime-to-p part of the invariant factor contributes nothing
        // to the pro-p completion, so only the p-valuation survives.
        if v > 0 {
            kept.push((j, v));
        }
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let group = FiniteAbelianPGroup::new(prime, kept.iter().map(|&(_, v)| v).collect())?;
    let slots = kept.iter().enumerate().map(|(slot, &(j, _))| (j, slot)).collect();
    Ok(PresentedGroup {
        group,
        right: snf.right,
        right_inv: snf.right_inv,
        slots,
        num_generators,
    })
}

impl PresentedGroup {
    pub fn group(&self) -> &FiniteAbelianPGroup {
        &self.group
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    /// Map a coefficient vector over the presentation's generators to the
    /// group element it represents.
    pub fn transport(&self, coeffs: &[BigInt]) -> GroupElement {
        assert_eq!(coeffs.len(), self.num_generators, "coefficient arity mismatch");
        let w = self.right.vec_mul(coeffs);
        let mut coords = vec![BigInt::zero(); self.group.rank()];
        for &(j, slot) in &self.slots {
            coords[slot] = w[j].clone();
        }
        self.group.element_from_bigints(&coords)
    }

    /// The image of the presentation's `i`-th generator.
    pub fn generator_image(&self, i: usize) -> GroupElement {
        let mut coeffs = vec![BigInt::zero(); self.num_generators];
        coeffs[i] = BigInt::from(1);
        self.transport(&coeffs)
    }

    /// A coefficient vector mapping back onto the given element: a section
    /// of `transport`.
    pub fn section(&self, elem: &GroupElement) -> Vec<BigInt> {
        let mut w = vec![BigInt::zero(); self.num_generators];
        for &(j, slot) in &self.slots {
            w[j] = BigInt::from(elem.coords()[slot]);
        }
        self.right_inv.vec_mul(&w)
    }
}

/// The quotient of a concrete group by the subgroup its `gens` generate,
/// with transport from ambient coordinates to quotient coordinates.
pub fn quotient_by_subgroup(
    g: &FiniteAbelianPGroup,
    gens: &[GroupElement],
) -> Result<PresentedGroup, Error> {
    let n = g.rank();
    let mut relations: Vec<Vec<BigInt>> = Vec::with_capacity(n + gens.len());
    for j in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[j] = BigInt::from(g.prime()).pow(g.exponents()[j]);
        relations.push(row);
    }
    for gen in gens {
        relations.push(gen.coords().iter().map(|&c| BigInt::from(c)).collect());
    }
    group_from_presentation(g.prime(), n, &relations)
}
