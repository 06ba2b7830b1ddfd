//! Presenting a descriptor as a tree of products and cyclic extensions.
//!
//! Every torsion descriptor is realized by a presentation tree built from
//! three node kinds: a leaf presents a single Cartesian layer, a product
//! node presents a countable family of simpler trees, and an extension node
//! adjoins one generator `x` to a base group with the relation
//! `p^r x = delta` for a diagonal element `delta` of the base.
//!
//! The dispatch follows the shape of the order type `t` of the torsion
//! sequence:
//!
//! * `t = 1`: a leaf.
//! * `t` a double successor with cyclic final layer: a cyclic extension of
//!   the sequence with the final layer removed.
//! * `t` a successor with a non-cyclic final layer: a product of children
//!   that each flatten one cyclic factor of the final layer on top of a
//!   residue-class share of the lower layers.  Every child with a top is a
//!   cyclic extension, so the recursion strictly shrinks.
//! * `t` a limit: a product of windowed children along the canonical
//!   fundamental sequence of `t`, with residue-class shares arranged so the
//!   windows reassemble exactly.
//! * `t = s + 1` with `s` a limit and a cyclic final layer: a cyclic
//!   extension whose base is a windowed product in which every child keeps
//!   a cyclic top; the extension's diagonal runs through those tops.
//!
//! Residue-class shares split a layer by the dyadic valuation of its
//! support rank: the share of valuation `n` goes to child `n`, so every
//! share of an unbounded layer is unbounded and the shares of all children
//! partition the layer.  The symbolic verifier recomputes the realized
//! descriptor of a tree from these closed forms and checks the family
//! reassembly at two truncation depths.

pub mod diagonal;
pub mod materialize;

use serde::{Deserialize, Serialize};

use crate::cardinal::CardinalCount;
use crate::descriptor::ProPDescriptor;
use crate::error::Error;
use crate::multiplicity::{CartesianDescriptor, MultiplicitySeq};
use crate::ordinal::OrdinalCNF;
use crate::sequence::TorsionSequence;

pub use diagonal::{check_delta_condition, theta_truncated, DiagonalSpec, ThetaMap};
pub use materialize::{materialize, MaterializedTree};

/// Largest supported family-child index; residue masks use `2^(n+1)` moduli.
const MAX_CHILD_INDEX: u64 = 32;

/// A tree of products and cyclic extensions presenting a torsion descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresentationTree {
    /// A single Cartesian layer, presented directly.
    Leaf(CartesianDescriptor),
    /// A product of a family of simpler trees.
    Product(Family),
    /// One new generator `x` over the child, with `p^order_exp x = delta`.
    Extension {
        child: Box<PresentationTree>,
        order_exp: u32,
        diagonal: DiagonalSpec,
    },
}

/// The children of a product node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Finitely many explicit children.
    Finite(Vec<PresentationTree>),
    /// Countably many children given by a closed-form scheme.
    Omega(FamilyScheme),
}

/// Closed forms for the children of an infinite product.
///
/// Each scheme determines, for every `n`, the torsion sequence of child `n`
/// and, for every `k`, the sequence of the residual product of children
/// `k, k+1, ...`; the children below `k` times the residual reassemble the
/// scheme's sequence exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyScheme {
    /// Successor type: child `n` takes the valuation-`n` share of every
    /// layer below the final one, plus the `n`-th factor of the final
    /// layer's flattening as a cyclic top.
    FinalFlatten { seq: TorsionSequence },
    /// Limit type `t`: child `n` sees the window below the `(n+1)`-st term
    /// of the fundamental sequence of `t`, each block masked so the blocks
    /// of all children partition every layer.
    LimitWindow { seq: TorsionSequence },
    /// Limit type, cyclic-top variant: as the windowed scheme, but the
    /// first layer of each block donates one cyclic factor to the previous
    /// child as its top, so every child has successor type with a cyclic
    /// final layer.
    LimitWindowCyclicTops { seq: TorsionSequence },
}

/// Which dispatch arm a torsion sequence falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionCase {
    /// Order type 1: a single layer, presented as a leaf.
    SingleLayer,
    /// Double successor with cyclic final layer: one cyclic extension.
    CyclicExtension,
    /// Successor with non-cyclic final layer, successor predecessor.
    FlattenedProduct,
    /// Limit type: windowed product.
    LimitProduct,
    /// Successor of a limit with cyclic final layer: a cyclic extension
    /// over a windowed product with cyclic tops.
    DiagonalLimitExtension,
    /// Successor of a limit with non-cyclic final layer.
    FlattenedLimitProduct,
}

/// The valuation-`n` residue-class share of a layer.
fn dyadic_part(layer: &CartesianDescriptor, n: u64) -> CartesianDescriptor {
    let modulus = 1u64 << (n + 1);
    layer.with_mults(layer.mults().mask_support_mod(modulus, modulus / 2))
}

/// The share of a layer left to children `k, k+1, ...`: valuation `>= k`.
fn residual_part(layer: &CartesianDescriptor, k: u64) -> CartesianDescriptor {
    layer.with_mults(layer.mults().mask_support_mod(1u64 << k, 0))
}

fn exp_u32(e: u64) -> u32 {
    u32::try_from(e).expect("layer exponents fit in u32")
}

/// Split a limit ordinal as `beta + w^e` (the last power peeled off).
fn limit_split(t: &OrdinalCNF) -> Result<(OrdinalCNF, u32), Error> {
    if !t.is_limit() {
        return Err(Error::NotALimitOrdinal(t.to_string()));
    }
    let mut terms = t.terms().to_vec();
    let (e, c) = *terms.last().expect("limit ordinals are nonzero");
    if c == 1 {
        terms.pop();
    } else {
        terms.last_mut().expect("nonempty").1 = c - 1;
    }
    Ok((OrdinalCNF::from_terms(terms), e))
}

/// `beta + w^(e-1) * c`, the start of window block `c`.
fn block_start(beta: &OrdinalCNF, e: u32, c: u64) -> OrdinalCNF {
    if c == 0 {
        beta.clone()
    } else {
        beta.add(&OrdinalCNF::monomial(e - 1, c))
    }
}

/// The smallest support exponent of `m` that is at least `min`.
fn first_support_at_least(m: &MultiplicitySeq, min: u64) -> Result<u64, Error> {
    for k in 1.. {
        match m.nth_support(k) {
            Some(v) if v >= min => return Ok(v),
            Some(_) => {}
            None => break,
        }
    }
    Err(Error::Construction(
        "a window layer has too little support to donate a top".into(),
    ))
}

impl FamilyScheme {
    /// The sequence the whole family multiplies out to.
    pub fn seq(&self) -> &TorsionSequence {
        match self {
            FamilyScheme::FinalFlatten { seq }
            | FamilyScheme::LimitWindow { seq }
            | FamilyScheme::LimitWindowCyclicTops { seq } => seq,
        }
    }

    fn prime_of(&self) -> Result<u64, Error> {
        self.seq()
            .prime()
            .ok_or_else(|| Error::Construction("an empty sequence presents no family".into()))
    }

    /// The single donated by block `c >= 1` to child `c - 1`: the exponent
    /// of the chosen factor and the remaining first layer of the block.
    fn donated_single(
        seq: &TorsionSequence,
        beta: &OrdinalCNF,
        e: u32,
        c: u64,
    ) -> Result<(u64, CartesianDescriptor), Error> {
        let position = block_start(beta, e, c);
        let entry = seq
            .entry_at(&position)
            .ok_or_else(|| Error::Construction("a window block starts past the sequence".into()))?;
        let exp = first_support_at_least(entry.mults(), c)?;
        let remainder = entry.with_mults(entry.mults().subtract_singles(&[exp]));
        Ok((exp, remainder))
    }

    /// The torsion sequence of child `n`.
    pub fn child_seq(&self, n: u64) -> Result<TorsionSequence, Error> {
        assert!(n <= MAX_CHILD_INDEX, "family child index exceeds {MAX_CHILD_INDEX}");
        match self {
            FamilyScheme::FinalFlatten { seq } => {
                let t = seq.order_type();
                let pred = t.predecessor().ok_or_else(|| {
                    Error::Construction("flattening needs a successor-type sequence".into())
                })?;
                let final_layer = seq.entry_at(&pred).expect("successor type has a final entry");
                let base = seq.truncate_to(&pred);
                let child = base.map_entries(|c| dyadic_part(c, n));
                match final_layer.mults().flatten_nth(n) {
                    Some(exp) => child
                        .append_layer(CartesianDescriptor::cyclic(final_layer.prime(), exp_u32(exp))?),
                    None => Ok(child),
                }
            }
            FamilyScheme::LimitWindow { seq } => {
                let (beta, e) = limit_split(&seq.order_type())?;
                let mut parts = vec![seq.truncate_to(&beta).map_entries(|c| dyadic_part(c, n))];
                for c in 0..=n {
                    let lo = block_start(&beta, e, c);
                    let hi = block_start(&beta, e, c + 1);
                    parts.push(seq.slice(&lo, &hi)?.map_entries(|x| dyadic_part(x, n - c)));
                }
                TorsionSequence::concat(&parts)
            }
            FamilyScheme::LimitWindowCyclicTops { seq } => {
                let prime = self.prime_of()?;
                let (beta, e) = limit_split(&seq.order_type())?;
                let mut parts = vec![seq.truncate_to(&beta).map_entries(|c| dyadic_part(c, n))];
                let first_block =
                    seq.slice(&block_start(&beta, e, 0), &block_start(&beta, e, 1))?;
                parts.push(first_block.map_entries(|c| dyadic_part(c, n)));
                for c in 1..=n {
                    let (_, remainder) = Self::donated_single(seq, &beta, e, c)?;
                    let lo = block_start(&beta, e, c);
                    let hi = block_start(&beta, e, c + 1);
                    parts.push(TorsionSequence::from_layers(vec![dyadic_part(&remainder, n - c)])?);
                    parts.push(
                        seq.slice(&lo.add(&OrdinalCNF::finite(1)), &hi)?
                            .map_entries(|x| dyadic_part(x, n - c)),
                    );
                }
                let (top_exp, _) = Self::donated_single(seq, &beta, e, n + 1)?;
                let child = TorsionSequence::concat(&parts)?;
                child.append_layer(CartesianDescriptor::cyclic(prime, exp_u32(top_exp))?)
            }
        }
    }

    /// The torsion sequence of the product of children `k, k+1, ...`.
    pub fn residual_seq(&self, k: u64) -> Result<TorsionSequence, Error> {
        assert!(k <= MAX_CHILD_INDEX, "family residual index exceeds {MAX_CHILD_INDEX}");
        match self {
            FamilyScheme::FinalFlatten { seq } => {
                let t = seq.order_type();
                let pred = t.predecessor().ok_or_else(|| {
                    Error::Construction("flattening needs a successor-type sequence".into())
                })?;
                let final_layer = seq.entry_at(&pred).expect("successor type has a final entry");
                let base = seq.truncate_to(&pred);
                let rest = base.map_entries(|c| residual_part(c, k));
                rest.append_layer(
                    final_layer.with_mults(final_layer.mults().flatten_residual(k)),
                )
            }
            FamilyScheme::LimitWindow { seq } => {
                let (beta, e) = limit_split(&seq.order_type())?;
                let mut parts = vec![seq.truncate_to(&beta).map_entries(|c| residual_part(c, k))];
                for c in 0..k {
                    let lo = block_start(&beta, e, c);
                    let hi = block_start(&beta, e, c + 1);
                    parts.push(seq.slice(&lo, &hi)?.map_entries(|x| residual_part(x, k - c)));
                }
                parts.push(seq.shift(&block_start(&beta, e, k))?);
                TorsionSequence::concat(&parts)
            }
            FamilyScheme::LimitWindowCyclicTops { seq } => {
                let (beta, e) = limit_split(&seq.order_type())?;
                let mut parts = vec![seq.truncate_to(&beta).map_entries(|c| residual_part(c, k))];
                let first_block =
                    seq.slice(&block_start(&beta, e, 0), &block_start(&beta, e, 1))?;
                parts.push(first_block.map_entries(|c| residual_part(c, k)));
                for c in 1..=k {
                    let (_, remainder) = Self::donated_single(seq, &beta, e, c)?;
                    let lo = block_start(&beta, e, c);
                    let hi = block_start(&beta, e, c + 1);
                    parts.push(TorsionSequence::from_layers(vec![residual_part(
                        &remainder,
                        k - c,
                    )])?);
                    parts.push(
                        seq.slice(&lo.add(&OrdinalCNF::finite(1)), &hi)?
                            .map_entries(|x| residual_part(x, k - c)),
                    );
                }
                parts.push(seq.shift(&block_start(&beta, e, k + 1))?);
                TorsionSequence::concat(&parts)
            }
        }
    }

    /// Whether child `n` carries a designated cyclic top.
    pub fn child_has_top(&self, n: u64) -> Result<bool, Error> {
        match self {
            FamilyScheme::FinalFlatten { seq } => {
                let t = seq.order_type();
                let pred = t.predecessor().ok_or_else(|| {
                    Error::Construction("flattening needs a successor-type sequence".into())
                })?;
                let final_layer = seq.entry_at(&pred).expect("successor type has a final entry");
                Ok(final_layer.mults().flatten_nth(n).is_some())
            }
            FamilyScheme::LimitWindow { .. } => Ok(false),
            FamilyScheme::LimitWindowCyclicTops { .. } => Ok(true),
        }
    }

    /// Construct the presentation tree of child `n`.
    pub fn child_tree(&self, n: u64) -> Result<PresentationTree, Error> {
        let prime = self.prime_of()?;
        let child = self.child_seq(n)?;
        if child.is_empty() {
            return Ok(PresentationTree::Leaf(CartesianDescriptor::trivial(prime)?));
        }
        construct_seq(prime, &child)
    }
}

impl PresentationTree {
    /// The prime the tree presents a group over, when determined.
    pub fn prime(&self) -> Option<u64> {
        match self {
            PresentationTree::Leaf(c) => Some(c.prime()),
            PresentationTree::Product(Family::Finite(children)) => {
                children.iter().find_map(|t| t.prime())
            }
            PresentationTree::Product(Family::Omega(scheme)) => scheme.seq().prime(),
            PresentationTree::Extension { child, .. } => child.prime(),
        }
    }
}

/// Which dispatch arm applies to a torsion sequence.
pub fn construction_case(seq: &TorsionSequence) -> Result<ConstructionCase, Error> {
    let t = seq.order_type();
    if t.is_zero() {
        return Err(Error::Construction("the torsion sequence is empty".into()));
    }
    if t.as_finite() == Some(1) {
        return Ok(ConstructionCase::SingleLayer);
    }
    if t.is_limit() {
        return Ok(ConstructionCase::LimitProduct);
    }
    let pred = t.predecessor().expect("successor ordinals have predecessors");
    let final_layer = seq.entry_at(&pred).expect("successor type has a final entry");
    let cyclic = final_layer.as_cyclic().is_some();
    if pred.is_successor() {
        if cyclic {
            Ok(ConstructionCase::CyclicExtension)
        } else {
            Ok(ConstructionCase::FlattenedProduct)
        }
    } else if cyclic {
        Ok(ConstructionCase::DiagonalLimitExtension)
    } else {
        Ok(ConstructionCase::FlattenedLimitProduct)
    }
}

/// Build a presentation tree realizing a torsion descriptor.
pub fn construct(descriptor: &ProPDescriptor) -> Result<PresentationTree, Error> {
    if !descriptor.free_rank().is_zero() {
        return Err(Error::Construction(
            "presentation trees realize torsion descriptors; this one has a free part".into(),
        ));
    }
    if !descriptor.validate().is_valid() {
        return Err(Error::InvalidSequence(
            "the descriptor fails the torsion-sequence laws".into(),
        ));
    }
    construct_seq(descriptor.prime(), descriptor.torsion_seq())
}

fn construct_seq(prime: u64, seq: &TorsionSequence) -> Result<PresentationTree, Error> {
    match construction_case(seq)? {
        ConstructionCase::SingleLayer => Ok(PresentationTree::Leaf(
            seq.entry_at(&OrdinalCNF::zero()).expect("nonempty sequence has a first entry"),
        )),
        ConstructionCase::LimitProduct => Ok(PresentationTree::Product(Family::Omega(
            FamilyScheme::LimitWindow { seq: seq.clone() },
        ))),
        ConstructionCase::FlattenedProduct | ConstructionCase::FlattenedLimitProduct => Ok(
            PresentationTree::Product(Family::Omega(FamilyScheme::FinalFlatten {
                seq: seq.clone(),
            })),
        ),
        ConstructionCase::CyclicExtension => {
            let pred = seq.order_type().predecessor().expect("successor type");
            let final_layer = seq.entry_at(&pred).expect("final entry");
            let order_exp = final_layer.as_cyclic().expect("cyclic final layer");
            let base = seq.truncate_to(&pred);
            Ok(PresentationTree::Extension {
                child: Box::new(construct_seq(prime, &base)?),
                order_exp,
                diagonal: DiagonalSpec::default(),
            })
        }
        ConstructionCase::DiagonalLimitExtension => {
            let pred = seq.order_type().predecessor().expect("successor type");
            let final_layer = seq.entry_at(&pred).expect("final entry");
            let order_exp = final_layer.as_cyclic().expect("cyclic final layer");
            let base = seq.truncate_to(&pred);
            Ok(PresentationTree::Extension {
                child: Box::new(PresentationTree::Product(Family::Omega(
                    FamilyScheme::LimitWindowCyclicTops { seq: base },
                ))),
                order_exp,
                diagonal: DiagonalSpec::default(),
            })
        }
    }
}

/// How many nested family levels the verifier rebuilds children for.
///
/// Family children multiply: rebuilding every child of every nested family
/// is exponential in the family depth, so below this depth the verifier
/// keeps the reassembly cross-check (which is what actually determines the
/// realized sequence) and skips re-running `construct` on the children.
const VERIFY_CHILD_DEPTH: u32 = 1;

/// Recompute the descriptor a tree realizes, from the closed forms alone.
///
/// Family nodes are checked two ways: the reassembled product (children
/// below `k` times the residual) must agree between two truncation depths
/// `k`, and down to a fixed nesting depth each inspected child is rebuilt
/// from its scheme sequence and must realize it exactly.  The realized
/// sequence of a family is its reassembly, so a wrong closed form surfaces
/// as a mismatch against the input descriptor.
pub fn verify_construction_symbolic(tree: &PresentationTree) -> Result<ProPDescriptor, Error> {
    let prime = tree
        .prime()
        .ok_or_else(|| Error::Construction("the tree determines no prime".into()))?;
    let seq = realized_seq(prime, tree, VERIFY_CHILD_DEPTH)?;
    ProPDescriptor::new(prime, seq, CardinalCount::ZERO)
}

fn realized_seq(
    prime: u64,
    tree: &PresentationTree,
    rebuild_depth: u32,
) -> Result<TorsionSequence, Error> {
    match tree {
        PresentationTree::Leaf(c) => TorsionSequence::from_layers(vec![c.clone()]),
        PresentationTree::Extension { child, order_exp, diagonal } => {
            diagonal.validate(prime)?;
            if *order_exp == 0 {
                return Err(Error::Construction("a cyclic extension needs a positive order".into()));
            }
            let base = realized_seq(prime, child, rebuild_depth)?;
            base.append_layer(CartesianDescriptor::cyclic(prime, *order_exp)?)
        }
        PresentationTree::Product(Family::Finite(children)) => {
            let mut acc = TorsionSequence::empty();
            for ch in children {
                acc = acc.termwise_product(&realized_seq(prime, ch, rebuild_depth)?)?;
            }
            Ok(acc)
        }
        PresentationTree::Product(Family::Omega(scheme)) => {
            let mut results: Vec<TorsionSequence> = Vec::new();
            for k in [2u64, 3] {
                let mut acc = scheme.residual_seq(k)?;
                for n in 0..k {
                    let child_seq = scheme.child_seq(n)?;
                    if rebuild_depth > 0 {
                        let child_real =
                            realized_seq(prime, &scheme.child_tree(n)?, rebuild_depth - 1)?;
                        if child_real != child_seq {
                            return Err(Error::Construction(
                                "a family child does not realize its scheme sequence".into(),
                            ));
                        }
                    }
                    acc = acc.termwise_product(&child_seq)?;
                }
                results.push(acc);
            }
            if results[0] != results[1] {
                return Err(Error::Construction(
                    "family reassembly differs between truncation depths".into(),
                ));
            }
            Ok(results.pop().expect("two depths were computed"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cardinal::CardinalCount::{Aleph0, Finite};
    use crate::multiplicity::Tail;
    use crate::sequence::Segment;

    fn full_layer(p: u64) -> CartesianDescriptor {
        CartesianDescriptor::full(p).unwrap()
    }

    fn torsion(p: u64, seq: TorsionSequence) -> ProPDescriptor {
        ProPDescriptor::new(p, seq, CardinalCount::ZERO).unwrap()
    }

    /// An unbounded layer supported on every third exponent.
    fn sparse_layer(p: u64) -> CartesianDescriptor {
        let mults = MultiplicitySeq::new(
            vec![],
            Tail::Periodic(vec![Finite(0), Finite(0), Aleph0]),
        );
        CartesianDescriptor::new(p, mults).unwrap()
    }

    #[test]
    fn dispatch_covers_all_cases() {
        let p = 2;
        let one = TorsionSequence::from_layers(vec![full_layer(p)]).unwrap();
        assert_eq!(construction_case(&one).unwrap(), ConstructionCase::SingleLayer);

        let cyclic_top = one.append_layer(CartesianDescriptor::cyclic(p, 3).unwrap()).unwrap();
        assert_eq!(construction_case(&cyclic_top).unwrap(), ConstructionCase::CyclicExtension);

        let wide_top = one
            .append_layer(
                full_layer(p).with_mults(MultiplicitySeq::single(1, Finite(2))),
            )
            .unwrap();
        assert_eq!(construction_case(&wide_top).unwrap(), ConstructionCase::FlattenedProduct);

        let omega = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![],
            repeating: full_layer(p),
        }])
        .unwrap();
        assert_eq!(construction_case(&omega).unwrap(), ConstructionCase::LimitProduct);

        let omega_cyclic =
            omega.append_layer(CartesianDescriptor::cyclic(p, 2).unwrap()).unwrap();
        assert_eq!(
            construction_case(&omega_cyclic).unwrap(),
            ConstructionCase::DiagonalLimitExtension
        );

        let omega_wide = omega
            .append_layer(full_layer(p).with_mults(MultiplicitySeq::single(2, Aleph0)))
            .unwrap();
        assert_eq!(
            construction_case(&omega_wide).unwrap(),
            ConstructionCase::FlattenedLimitProduct
        );

        assert!(construction_case(&TorsionSequence::empty()).is_err());
    }

    #[test]
    fn construct_rejects_free_parts_and_invalid_sequences() {
        let p = 3;
        let free = ProPDescriptor::free(p, Finite(2)).unwrap();
        let err = construct(&free).unwrap_err();
        assert!(matches!(err, Error::Construction(_)));

        let empty = torsion(p, TorsionSequence::empty());
        assert!(matches!(construct(&empty).unwrap_err(), Error::Construction(_)));

        // A bounded non-final layer breaks the sequence laws.
        let bounded = TorsionSequence::from_layers(vec![
            CartesianDescriptor::cyclic(p, 1).unwrap(),
            CartesianDescriptor::cyclic(p, 2).unwrap(),
        ])
        .unwrap();
        let err = construct(&torsion(p, bounded)).unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
    }

    #[test]
    fn single_layer_round_trip() {
        let d = torsion(2, TorsionSequence::from_layers(vec![full_layer(2)]).unwrap());
        let tree = construct(&d).unwrap();
        assert!(matches!(tree, PresentationTree::Leaf(_)));
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn cyclic_extension_round_trip() {
        let p = 2;
        let seq = TorsionSequence::from_layers(vec![full_layer(p)])
            .unwrap()
            .append_layer(CartesianDescriptor::cyclic(p, 3).unwrap())
            .unwrap();
        let d = torsion(p, seq);
        let tree = construct(&d).unwrap();
        match &tree {
            PresentationTree::Extension { child, order_exp, .. } => {
                assert_eq!(*order_exp, 3);
                assert!(matches!(**child, PresentationTree::Leaf(_)));
            }
            other => panic!("expected an extension, got {other:?}"),
        }
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn flattened_product_round_trip() {
        let p = 2;
        // Final layer with aleph_0 cyclic factors: every child gets a top.
        let seq = TorsionSequence::from_layers(vec![sparse_layer(p)])
            .unwrap()
            .append_layer(full_layer(p).with_mults(MultiplicitySeq::single(2, Aleph0)))
            .unwrap();
        let d = torsion(p, seq.clone());
        let tree = construct(&d).unwrap();
        let scheme = match &tree {
            PresentationTree::Product(Family::Omega(s)) => s.clone(),
            other => panic!("expected a family product, got {other:?}"),
        };
        // Children flatten one final factor on a residue share of the base.
        for n in 0..3 {
            let child = scheme.child_seq(n).unwrap();
            assert_eq!(child.order_type(), OrdinalCNF::finite(2));
            let top = child.entry_at(&OrdinalCNF::finite(1)).unwrap();
            assert_eq!(top.as_cyclic(), Some(2));
            assert!(scheme.child_has_top(n).unwrap());
            assert_eq!(construction_case(&child).unwrap(), ConstructionCase::CyclicExtension);
        }
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn flattened_product_with_finite_final_layer() {
        let p = 3;
        // Two cyclic factors on top: children 0 and 1 get tops, the rest do not.
        let final_layer = full_layer(p).with_mults(MultiplicitySeq::new(
            vec![Finite(1), Finite(1)],
            Tail::Zero,
        ));
        let seq = TorsionSequence::from_layers(vec![full_layer(p)])
            .unwrap()
            .append_layer(final_layer)
            .unwrap();
        let d = torsion(p, seq);
        let tree = construct(&d).unwrap();
        let scheme = match &tree {
            PresentationTree::Product(Family::Omega(s)) => s.clone(),
            other => panic!("expected a family product, got {other:?}"),
        };
        assert!(scheme.child_has_top(0).unwrap());
        assert!(scheme.child_has_top(1).unwrap());
        assert!(!scheme.child_has_top(2).unwrap());
        assert_eq!(scheme.child_seq(2).unwrap().order_type(), OrdinalCNF::finite(1));
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn limit_product_round_trip() {
        let p = 2;
        let omega = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![sparse_layer(p)],
            repeating: full_layer(p),
        }])
        .unwrap();
        let d = torsion(p, omega.clone());
        let tree = construct(&d).unwrap();
        let scheme = match &tree {
            PresentationTree::Product(Family::Omega(s)) => s.clone(),
            other => panic!("expected a family product, got {other:?}"),
        };
        // Child n sees positions up to n+1.
        for n in 0..3u64 {
            let child = scheme.child_seq(n).unwrap();
            assert_eq!(child.order_type(), OrdinalCNF::finite(n + 1));
        }
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn family_reassembly_law_directly() {
        let p = 2;
        let omega = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![],
            repeating: full_layer(p),
        }])
        .unwrap();
        for scheme in [
            FamilyScheme::LimitWindow { seq: omega.clone() },
            FamilyScheme::LimitWindowCyclicTops { seq: omega.clone() },
        ] {
            for k in 1..=3u64 {
                let mut acc = scheme.residual_seq(k).unwrap();
                for n in 0..k {
                    acc = acc.termwise_product(&scheme.child_seq(n).unwrap()).unwrap();
                }
                assert_eq!(acc, omega, "children below {k} times the residual reassemble");
            }
        }

        let with_top = omega.append_layer(CartesianDescriptor::cyclic(p, 4).unwrap()).unwrap();
        let flatten = FamilyScheme::FinalFlatten { seq: with_top.clone() };
        for k in 1..=3u64 {
            let mut acc = flatten.residual_seq(k).unwrap();
            for n in 0..k {
                acc = acc.termwise_product(&flatten.child_seq(n).unwrap()).unwrap();
            }
            assert_eq!(acc, with_top);
        }
    }

    #[test]
    fn diagonal_limit_extension_round_trip() {
        let p = 2;
        let omega = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![],
            repeating: full_layer(p),
        }])
        .unwrap();
        let seq = omega.append_layer(CartesianDescriptor::cyclic(p, 2).unwrap()).unwrap();
        let d = torsion(p, seq);
        let tree = construct(&d).unwrap();
        let scheme = match &tree {
            PresentationTree::Extension { child, order_exp, .. } => {
                assert_eq!(*order_exp, 2);
                match &**child {
                    PresentationTree::Product(Family::Omega(
                        s @ FamilyScheme::LimitWindowCyclicTops { .. },
                    )) => s.clone(),
                    other => panic!("expected a cyclic-top family, got {other:?}"),
                }
            }
            other => panic!("expected an extension, got {other:?}"),
        };
        // Every child ends in a cyclic top whose order grows with n.
        let mut last_top = 0;
        for n in 0..3u64 {
            let child = scheme.child_seq(n).unwrap();
            let t = child.order_type();
            let top = child.entry_at(&t.predecessor().unwrap()).unwrap();
            let r = top.as_cyclic().expect("cyclic top");
            assert!(u64::from(r) >= n + 1, "top orders grow");
            assert!(r > last_top || n == 0);
            last_top = r;
            assert_eq!(construction_case(&child).unwrap(), ConstructionCase::CyclicExtension);
        }
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn flattened_limit_product_round_trip() {
        let p = 3;
        let omega = TorsionSequence::from_segments(vec![Segment::Omega {
            prefix: vec![],
            repeating: full_layer(p),
        }])
        .unwrap();
        let seq = omega
            .append_layer(full_layer(p).with_mults(MultiplicitySeq::single(1, Aleph0)))
            .unwrap();
        let d = torsion(p, seq);
        let tree = construct(&d).unwrap();
        assert!(matches!(
            tree,
            PresentationTree::Product(Family::Omega(FamilyScheme::FinalFlatten { .. }))
        ));
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn deep_sequence_round_trip() {
        let p = 2;
        // Type w*2 + 1: two limit blocks and a cyclic top.
        let seq = TorsionSequence::from_segments(vec![
            Segment::Omega { prefix: vec![], repeating: full_layer(p) },
            Segment::Omega { prefix: vec![sparse_layer(p)], repeating: full_layer(p) },
            Segment::Run(vec![CartesianDescriptor::cyclic(p, 5).unwrap()]),
        ])
        .unwrap();
        let d = torsion(p, seq);
        let tree = construct(&d).unwrap();
        assert_eq!(verify_construction_symbolic(&tree).unwrap(), d);
    }

    #[test]
    fn tree_serde_round_trip() {
        let p = 2;
        let seq = TorsionSequence::from_layers(vec![full_layer(p)])
            .unwrap()
            .append_layer(CartesianDescriptor::cyclic(p, 3).unwrap())
            .unwrap();
        let tree = construct(&torsion(p, seq)).unwrap();
        let json = serde_json::to_string(&tree).unwrap();
        let back: PresentationTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tree);
    }

    #[test]
    fn verify_rejects_inconsistent_trees() {
        let p = 2;
        // An extension with order 0 is not a new layer.
        let bad = PresentationTree::Extension {
            child: Box::new(PresentationTree::Leaf(full_layer(p))),
            order_exp: 0,
            diagonal: DiagonalSpec::default(),
        };
        assert!(verify_construction_symbolic(&bad).is_err());

        // A diagonal whose unit collapses modulo p is rejected.
        let bad_unit = PresentationTree::Extension {
            child: Box::new(PresentationTree::Leaf(full_layer(p))),
            order_exp: 2,
            diagonal: DiagonalSpec { default_unit: 2, overrides: vec![] },
        };
        assert!(verify_construction_symbolic(&bad_unit).is_err());
    }
}
