//! Materializing a presentation tree as a finite group.
//!
//! `materialize(tree, level, cap)` truncates the infinite data and builds the
//! resulting finite abelian p-group concretely:
//!
//! * a leaf keeps its factors of exponent at most `level`, at most `cap`
//!   copies each;
//! * a family product keeps its first `level` children;
//! * an extension with `r` at most `level` keeps its exact shape: one new
//!   generator `x` over the materialized child `H`, presented by
//!   `p^r x = delta` with `delta` the diagonal over the child's designated
//!   top generators; with `r` beyond the level the new generator vanishes at
//!   this stage, like any other factor of exponent beyond the level.
//!
//! Whenever the new generator survives, the extension laws hold: the order
//! is `|H| * p^r`, and the quotient by the image of `H` is cyclic of order
//! `p^r`.

use num_bigint::BigInt;

use crate::error::Error;
use crate::finite::presentation::group_from_presentation;
use crate::finite::{FiniteAbelianPGroup, GroupElement};

use super::diagonal::DiagonalSpec;
use super::{Family, PresentationTree};

/// A finite stage of a presentation tree.
#[derive(Debug, Clone)]
pub struct MaterializedTree {
    /// The stage group itself.
    pub group: FiniteAbelianPGroup,
    /// Images of all logical generators, in tree order.
    pub generators: Vec<GroupElement>,
    /// Generators of the realized final layer, used by extension diagonals.
    pub top_gens: Vec<GroupElement>,
    /// For an extension node: the images of the child's generators.
    pub child_images: Option<Vec<GroupElement>>,
    /// For an extension node: the image of the new generator `x`.
    pub new_gen: Option<GroupElement>,
    /// For an extension node: the diagonal, as an element of the child group.
    pub delta: Option<GroupElement>,
}

/// Build the stage group of `tree` at truncation `level`, keeping at most
/// `cap` copies of each cyclic factor.
pub fn materialize(
    tree: &PresentationTree,
    level: u32,
    cap: u64,
) -> Result<MaterializedTree, Error> {
    assert!(level >= 1, "stages start at level 1");
    match tree {
        PresentationTree::Leaf(layer) => {
            let mut exponents = Vec::new();
            for (e, count) in layer.mults().truncate(level, cap) {
                for _ in 0..count {
                    exponents.push(e);
                }
            }
            let group = FiniteAbelianPGroup::new(layer.prime(), exponents)?;
            let generators: Vec<GroupElement> =
                (0..group.rank()).map(|j| group.generator(j)).collect();
            Ok(MaterializedTree {
                group,
                top_gens: generators.clone(),
                generators,
                child_images: None,
                new_gen: None,
                delta: None,
            })
        }
        PresentationTree::Product(Family::Finite(children)) => {
            if children.is_empty() {
                return Err(Error::Construction("an empty finite family has no prime".into()));
            }
            let parts = children
                .iter()
                .map(|ch| materialize(ch, level, cap))
                .collect::<Result<Vec<_>, _>>()?;
            sum_parts(parts, |_| true)
        }
        PresentationTree::Product(Family::Omega(scheme)) => {
            let mut parts = Vec::new();
            let mut with_top = Vec::new();
            for n in 0..u64::from(level) {
                let child = scheme.child_tree(n)?;
                parts.push(materialize(&child, level, cap)?);
                with_top.push(scheme.child_has_top(n)?);
            }
            sum_parts(parts, |i| with_top[i])
        }
        PresentationTree::Extension { child, order_exp, diagonal } => {
            let base = materialize(child, level, cap)?;
            extend(base, *order_exp, diagonal, level)
        }
    }
}

/// Direct sum of materialized parts, with tops drawn from the flagged ones.
fn sum_parts(
    parts: Vec<MaterializedTree>,
    keeps_top: impl Fn(usize) -> bool,
) -> Result<MaterializedTree, Error> {
    let groups: Vec<FiniteAbelianPGroup> = parts.iter().map(|p| p.group.clone()).collect();
    let (sum, embeddings) = FiniteAbelianPGroup::direct_sum(&groups)?;
    let mut generators = Vec::new();
    let mut top_gens = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        for g in &part.generators {
            generators.push(embeddings[i].apply(&sum, g));
        }
        if keeps_top(i) {
            for g in &part.top_gens {
                top_gens.push(embeddings[i].apply(&sum, g));
            }
        }
    }
    Ok(MaterializedTree {
        group: sum,
        generators,
        top_gens,
        child_images: None,
        new_gen: None,
        delta: None,
    })
}

/// Adjoin one generator `x` with `p^r x = delta` over a materialized base.
///
/// A new generator of order exponent beyond the stage level vanishes at this
/// stage, exactly as a leaf factor of exponent beyond the level does; the
/// child then passes through unchanged with an empty final layer.
fn extend(
    base: MaterializedTree,
    order_exp: u32,
    diagonal: &DiagonalSpec,
    level: u32,
) -> Result<MaterializedTree, Error> {
    if order_exp > level {
        let child_images = base.generators.clone();
        return Ok(MaterializedTree {
            group: base.group,
            generators: base.generators,
            top_gens: Vec::new(),
            child_images: Some(child_images),
            new_gen: None,
            delta: None,
        });
    }
    let h = &base.group;
    let prime = h.prime();
    let delta = diagonal.element(h, &base.top_gens)?;
    let n = h.rank() + 1;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (j, e) in h.exponents().iter().enumerate() {
        let mut row = vec![BigInt::from(0); n];
        row[j] = BigInt::from(prime).pow(*e);
        rows.push(row);
    }
    let mut relation: Vec<BigInt> =
        delta.coords().iter().map(|&c| -BigInt::from(c)).collect();
    relation.push(BigInt::from(prime).pow(order_exp));
    rows.push(relation);
    let presented = group_from_presentation(prime, n, &rows)?;
    let child_images: Vec<GroupElement> =
        (0..h.rank()).map(|j| presented.generator_image(j)).collect();
    let new_gen = presented.generator_image(h.rank());
    let mut generators = child_images.clone();
    generators.push(new_gen.clone());
    Ok(MaterializedTree {
        group: presented.group().clone(),
        generators,
        top_gens: vec![new_gen.clone()],
        child_images: Some(child_images),
        new_gen: Some(new_gen),
        delta: Some(delta),
    })
}
