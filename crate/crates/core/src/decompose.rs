//! Decomposing an infinite product into an infinite product of parts.
//!
//! A descriptor whose torsion closure has infinitely many Cartesian
//! factors splits as a product of infinitely many nontrivial parts.  Each
//! layer is divided by residue classes of its support ranks: part `n`
//! takes the support positions whose rank has dyadic valuation `n`, so
//! every part of an unbounded layer stays unbounded, and the parts of all
//! layers reassemble exactly.
//!
//! The final layer of a successor-type sequence needs care: a finite final
//! layer is dealt out one cyclic factor per part, a bounded-infinite one
//! spreads its infinite counts to every part, and an unbounded one splits
//! like any other layer.  The cyclic-tops style instead arranges that
//! every part ends in a single cyclic factor, drawing on the next layer
//! down when the final layer runs out.

use crate::cardinal::CardinalCount;
use crate::descriptor::ProPDescriptor;
use crate::error::Error;
use crate::multiplicity::{CartesianDescriptor, MultiplicitySeq, Tail};
use crate::sequence::{Segment, TorsionSequence};
use serde::{Deserialize, Serialize};

/// How to treat the final layer of a successor-type sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionStyle {
    /// Residue-class splitting throughout; finite final layers are dealt
    /// out as single factors and exhaust after finitely many parts.
    Default,
    /// Every part receives exactly one cyclic factor on top.
    CyclicTops,
}

/// Which piece of the decomposition to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    Part(u64),
    ResidualAfter(u64),
}

/// A validated decomposition of one descriptor into parts and residuals.
#[derive(Debug, Clone)]
pub struct DecompositionPlan {
    descriptor: ProPDescriptor,
    style: DecompositionStyle,
}

/// Largest supported part or residual index; masks use `2^(n+1)` moduli.
const MAX_INDEX: u64 = 32;

impl DecompositionPlan {
    /// Plan a decomposition, checking that one exists.
    pub fn new(descriptor: &ProPDescriptor, style: DecompositionStyle) -> Result<Self, Error> {
        let report = descriptor.validate();
        if !report.is_valid() {
            return Err(Error::InvalidSequence(
                "the descriptor fails the torsion-sequence laws".into(),
            ));
        }
        let seq = descriptor.torsion_seq();
        if seq.is_empty() {
            return Err(Error::NotDecomposable("the torsion sequence is empty".into()));
        }
        let first = seq
            .entry_at(&crate::ordinal::OrdinalCNF::zero())
            .expect("nonempty sequence has a first entry");
        if first.mults().total_factors() != CardinalCount::Aleph0 {
            return Err(Error::NotDecomposable(
                "the torsion closure has finitely many factors".into(),
            ));
        }
        if style == DecompositionStyle::CyclicTops {
            if !seq.order_type().is_successor() {
                return Err(Error::NotDecomposable(
                    "cyclic tops require a successor torsion type".into(),
                ));
            }
            let (_, final_layer, penultimate) = split_trailing(seq);
            let f = final_layer.expect("successor type has a final layer");
            if f.mults().total_factors() != CardinalCount::Aleph0 && penultimate.is_none() {
                return Err(Error::NotDecomposable(
                    "cyclic tops with a finite final layer need a penultimate layer".into(),
                ));
            }
        }
        Ok(DecompositionPlan { descriptor: descriptor.clone(), style })
    }

    pub fn descriptor(&self) -> &ProPDescriptor {
        &self.descriptor
    }

    pub fn style(&self) -> DecompositionStyle {
        self.style
    }

    /// The `n`-th part.
    pub fn part(&self, n: u64) -> ProPDescriptor {
        self.build(Piece::Part(n))
    }

    /// Everything from part `k` on, as one descriptor.
    pub fn residual_after(&self, k: u64) -> ProPDescriptor {
        self.build(Piece::ResidualAfter(k))
    }

    /// The first `k` parts together with the residual after them.
    pub fn take(&self, k: u64) -> (Vec<ProPDescriptor>, ProPDescriptor) {
        let parts = (0..k).map(|n| self.part(n)).collect();
        (parts, self.residual_after(k))
    }

    fn build(&self, piece: Piece) -> ProPDescriptor {
        let d = &self.descriptor;
        let seq = d.torsion_seq();
        let (body, final_layer, penultimate) = split_trailing(seq);
        let index = match piece {
            Piece::Part(n) | Piece::ResidualAfter(n) => n,
        };
        assert!(index <= MAX_INDEX, "part index exceeds the supported range");

        // Decide the transforms for the two special positions up front.
        let cyclic_finite = self.style == DecompositionStyle::CyclicTops
            && final_layer
                .as_ref()
                .is_some_and(|f| f.mults().total_factors() != CardinalCount::Aleph0);

        let mut segments: Vec<Segment> = Vec::new();
        for seg in body {
            segments.push(match seg {
                Segment::Run(v) => {
                    Segment::Run(v.iter().map(|e| residue_split(e, piece)).collect())
                }
                Segment::Omega { prefix, repeating } => Segment::Omega {
                    prefix: prefix.iter().map(|e| residue_split(e, piece)).collect(),
                    repeating: residue_split(&repeating, piece),
                },
            });
        }
        if let Some(p) = &penultimate {
            let transformed = if cyclic_finite {
                let s = final_count(final_layer.as_ref().expect("cyclic_finite implies a final"));
                penultimate_share(p, s, piece)
            } else {
                residue_split(p, piece)
            };
            segments.push(Segment::Run(vec![transformed]));
        }
        if let Some(f) = &final_layer {
            let transformed = match self.style {
                DecompositionStyle::CyclicTops => single_share(f, piece),
                DecompositionStyle::Default => {
                    if f.unbounded_exponent() {
                        residue_split(f, piece)
                    } else if f.mults().total_factors() == CardinalCount::Aleph0 {
                        spread_bounded(f, piece)
                    } else {
                        single_share(f, piece)
                    }
                }
            };
            segments.push(Segment::Run(vec![transformed]));
        }
        let free_rank = if index == 0 { d.free_rank() } else { CardinalCount::ZERO };
        let seq = TorsionSequence::from_segments(segments).expect("one prime throughout");
        ProPDescriptor::new(d.prime(), seq, free_rank).expect("prime is validated")
    }
}

/// Separate the final layer and, when the type has two trailing successor
/// steps, the penultimate layer, from the rest of the sequence.
fn split_trailing(
    seq: &TorsionSequence,
) -> (Vec<Segment>, Option<CartesianDescriptor>, Option<CartesianDescriptor>) {
    let mut segments = seq.segments().to_vec();
    let Some(Segment::Run(run)) = segments.last_mut() else {
        return (segments, None, None);
    };
    let final_layer = run.pop();
    let penultimate = run.pop();
    if run.is_empty() {
        segments.pop();
    }
    (segments, final_layer, penultimate)
}

/// The number of factors of a finite final layer.
fn final_count(f: &CartesianDescriptor) -> u64 {
    match f.mults().total_factors() {
        CardinalCount::Finite(s) => s,
        CardinalCount::Aleph0 => unreachable!("caller checked finiteness"),
    }
}

/// Residue-class split of a layer: part `n` keeps the support ranks of
/// dyadic valuation `n`; the residual after `k` keeps valuations `>= k`.
fn residue_split(e: &CartesianDescriptor, piece: Piece) -> CartesianDescriptor {
    let mults = match piece {
        Piece::Part(n) => e.mults().mask_support_mod(1 << (n + 1), 1 << n),
        Piece::ResidualAfter(k) => e.mults().mask_support_mod(1 << k, 0),
    };
    e.with_mults(mults)
}

/// Deal out single factors: part `n` takes the `n`-th factor in the
/// flattening order; the residual keeps everything after the first `k`.
fn single_share(f: &CartesianDescriptor, piece: Piece) -> CartesianDescriptor {
    let mults = match piece {
        Piece::Part(n) => match f.mults().flatten_nth(n) {
            Some(exp) => MultiplicitySeq::single(
                u32::try_from(exp).expect("factor exponent fits u32"),
                CardinalCount::Finite(1),
            ),
            None => MultiplicitySeq::zero(),
        },
        Piece::ResidualAfter(k) => f.mults().flatten_residual(k),
    };
    f.with_mults(mults)
}

/// Spread a bounded layer with infinite counts: every part receives the
/// infinite counts; the finite counts stay with part zero.
fn spread_bounded(f: &CartesianDescriptor, piece: Piece) -> CartesianDescriptor {
    let keep_finites = matches!(piece, Piece::Part(0) | Piece::ResidualAfter(0));
    let mults = aleph0_spread(f.mults(), keep_finites);
    f.with_mults(mults)
}

fn aleph0_spread(m: &MultiplicitySeq, keep_finites: bool) -> MultiplicitySeq {
    debug_assert_eq!(*m.tail(), Tail::Zero, "spreading needs a bounded layer");
    let prefix = m
        .prefix()
        .iter()
        .map(|&c| match c {
            CardinalCount::Aleph0 => CardinalCount::Aleph0,
            CardinalCount::Finite(n) if keep_finites => CardinalCount::Finite(n),
            CardinalCount::Finite(_) => CardinalCount::ZERO,
        })
        .collect();
    MultiplicitySeq::new(prefix, Tail::Zero)
}

/// The penultimate layer under cyclic tops with a finite final layer of
/// `s` factors: parts below `s` share the even support ranks by residue
/// class, parts `s` and beyond take the odd ranks as single cyclic tops.
fn penultimate_share(p: &CartesianDescriptor, s: u64, piece: Piece) -> CartesianDescriptor {
    let odd = p.mults().mask_support_mod(2, 1);
    let even_share = |r: u64| p.mults().mask_support_mod(2 * s, (2 * r) % (2 * s));
    let mults = match piece {
        Piece::Part(n) if n < s => even_share(n),
        Piece::Part(n) => match odd.flatten_nth(n - s) {
            Some(exp) => MultiplicitySeq::single(
                u32::try_from(exp).expect("factor exponent fits u32"),
                CardinalCount::Finite(1),
            ),
            None => MultiplicitySeq::zero(),
        },
        Piece::ResidualAfter(k) if k < s => {
            let mut acc = odd;
            for r in k..s {
                acc = acc.pointwise_add(&even_share(r));
            }
            acc
        }
        Piece::ResidualAfter(k) => odd.flatten_residual(k - s),
    };
    p.with_mults(mults)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cardinal::{Aleph0, Finite};
    use crate::ordinal::OrdinalCNF;
    use crate::torsion::{product_of, torsion_type};

    fn full(p: u64) -> CartesianDescriptor {
        CartesianDescriptor::full(p).unwrap()
    }

    fn check_law(plan: &DecompositionPlan, k: u64) {
        let (mut parts, residual) = plan.take(k);
        parts.push(residual);
        let back = product_of(&parts).unwrap();
        assert_eq!(&back, plan.descriptor(), "parts and residual must reassemble the input");
    }

    #[test]
    fn residue_classes_split_a_full_layer() {
        let d = ProPDescriptor::new(
            2,
            TorsionSequence::from_layers(vec![full(2)]).unwrap(),
            Finite(0),
        )
        .unwrap();
        let plan = DecompositionPlan::new(&d, DecompositionStyle::Default).unwrap();
        let p0 = plan.part(0);
        let layer0 = crate::torsion::closure_of_torsion(&p0);
        // Part 0 keeps the odd support ranks of an all-ones layer.
        assert_eq!(layer0.mults().term(1), Finite(1));
        assert_eq!(layer0.mults().term(2), Finite(0));
        assert_eq!(layer0.mults().term(3), Finite(1));
        let p1 = plan.part(1);
        let layer1 = crate::torsion::closure_of_torsion(&p1);
        assert_eq!(layer1.mults().term(1), Finite(0));
        assert_eq!(layer1.mults().term(2), Finite(1));
        assert_eq!(layer1.mults().term(4), Finite(0));
        assert_eq!(layer1.mults().term(6), Finite(1));
        // Every part is unbounded, so every part is itself decomposable.
        for n in 0..4 {
            assert!(crate::torsion::closure_of_torsion(&plan.part(n)).unbounded_exponent());
        }
        for k in [0, 1, 2, 5] {
            check_law(&plan, k);
        }
    }

    #[test]
    fn free_rank_rides_with_part_zero() {
        let d = ProPDescriptor::new(
            2,
            TorsionSequence::from_layers(vec![full(2)]).unwrap(),
            Aleph0,
        )
        .unwrap();
        let plan = DecompositionPlan::new(&d, DecompositionStyle::Default).unwrap();
        assert_eq!(plan.part(0).free_rank(), Aleph0);
        assert_eq!(plan.part(1).free_rank(), Finite(0));
        assert_eq!(plan.residual_after(3).free_rank(), Finite(0));
        assert_eq!(plan.residual_after(0), d);
        check_law(&plan, 3);
    }

    #[test]
    fn a_finite_final_layer_is_dealt_out_and_exhausts() {
        // Layers: full, full, ... then a final layer C_32 + C_128.
        let f = CartesianDescriptor::new(
            2,
            MultiplicitySeq::new(
                vec![Finite(0), Finite(0), Finite(0), Finite(0), Finite(1), Finite(0), Finite(1)],
                Tail::Zero,
            ),
        )
        .unwrap();
        let seq = TorsionSequence::from_segments(vec![
            Segment::Omega { prefix: Vec::new(), repeating: full(2) },
            Segment::Run(vec![f]),
        ])
        .unwrap();
        let d = ProPDescriptor::new(2, seq, Finite(0)).unwrap();
        let plan = DecompositionPlan::new(&d, DecompositionStyle::Default).unwrap();
        // Part 0 gets the first factor (C_32), part 1 the second (C_128).
        let p0 = plan.part(0);
        let top0 = p0.torsion_seq().entry_at(&OrdinalCNF::omega()).unwrap();
        assert_eq!(top0.as_cyclic(), Some(5));
        let p1 = plan.part(1);
        let top1 = p1.torsion_seq().entry_at(&OrdinalCNF::omega()).unwrap();
        assert_eq!(top1.as_cyclic(), Some(7));
        // Later parts have no final layer left: their type drops to omega.
        let p2 = plan.part(2);
        assert_eq!(torsion_type(&p2), OrdinalCNF::omega());
        // The residual after one part still carries the second factor.
        let r1 = plan.residual_after(1);
        assert_eq!(torsion_type(&r1), OrdinalCNF::omega().successor());
        for k in [0, 1, 2, 4] {
            check_law(&plan, k);
        }
    }

    #[test]
    fn a_bounded_infinite_final_layer_spreads_its_infinite_counts() {
        // Final layer: 3 copies of C_2 plus infinitely many C_4.
        let f = CartesianDescriptor::new(
            2,
            MultiplicitySeq::new(vec![Finite(3), Aleph0], Tail::Zero),
        )
        .unwrap();
        let seq = TorsionSequence::from_segments(vec![
            Segment::Omega { prefix: Vec::new(), repeating: full(2) },
            Segment::Run(vec![f]),
        ])
        .unwrap();
        let d = ProPDescriptor::new(2, seq, Finite(0)).unwrap();
        let plan = DecompositionPlan::new(&d, DecompositionStyle::Default).unwrap();
        let top = |d: &ProPDescriptor| d.torsion_seq().entry_at(&OrdinalCNF::omega()).unwrap();
        assert_eq!(top(&plan.part(0)).mults().term(1), Finite(3));
        assert_eq!(top(&plan.part(0)).mults().term(2), Aleph0);
        assert_eq!(top(&plan.part(1)).mults().term(1), Finite(0));
        assert_eq!(top(&plan.part(1)).mults().term(2), Aleph0);
        assert_eq!(top(&plan.residual_after(2)).mults().term(2), Aleph0);
        // Every part keeps the full type.
        for n in 0..4 {
            assert_eq!(torsion_type(&plan.part(n)), OrdinalCNF::omega().successor());
        }
        for k in [0, 2, 3] {
            check_law(&plan, k);
        }
    }

    #[test]
    fn an_unbounded_final_layer_splits_like_any_other() {
        let seq = TorsionSequence::from_segments(vec![
            Segment::Omega { prefix: Vec::new(), repeating: full(3) },
            Segment::Run(vec![full(3)]),
        ])
        .unwrap();
        let d = ProPDescriptor::new(3, seq, Finite(0)).unwrap();
        let plan = DecompositionPlan::new(&d, DecompositionStyle::Default).unwrap();
        for n in 0..3 {
            let p = plan.part(n);
            assert_eq!(torsion_type(&p), OrdinalCNF::omega().successor());
            let top = p.torsion_seq().entry_at(&OrdinalCNF::omega()).unwrap();
            assert!(top.unbounded_exponent());
        }
        check_law(&plan, 3);
    }

    #[test]
    fn cyclic_tops_give_every_part_a_cyclic_summit() {
        // Final layer with infinitely many factors: every part takes one.
        let seq = TorsionSequence::from_segments(vec![
            Segment::Omega { prefix: Vec::new(), repeating: full(2) },
            Segment::Run(vec![full(2)]),
        ])
        .unwrap();
        let d = ProPDescriptor::new(2, seq, Finite(0)).unwrap();
        let plan = DecompositionPlan::new(&d, DecompositionStyle::CyclicTops).unwrap();
        for n in 0..5 {
            let p = plan.part(n);
            assert_eq!(torsion_type(&p), OrdinalCNF::omega().successor());
            let top = p.torsion_seq().entry_at(&OrdinalCNF::omega()).unwrap();
            assert!(top.as_cyclic().is_some(), "part {n} must end in one cyclic factor");
        }
        for k in [0, 1, 3] {
            check_law(&plan, k);
        }
    }

    #[test]
    fn cyclic_tops_with_a_finite_final_layer_draw_on_the_penultimate() {
        // Two finite stages over p = 2: [full, C_8]; the single final
        // factor goes to part 0, later parts top out in the penultimate.
        let f = CartesianDescriptor::cyclic(2, 3).unwrap();
        let seq = TorsionSequence::from_layers(vec![full(2), f]).unwrap();
        let d = ProPDescriptor::new(2, seq, Finite(0)).unwrap();
        let plan = DecompositionPlan::new(&d, DecompositionStyle::CyclicTops).unwrap();
        let p0 = plan.part(0);
        assert_eq!(torsion_type(&p0), OrdinalCNF::finite(2));
        let top0 = p0.torsion_seq().entry_at(&OrdinalCNF::finite(1)).unwrap();
        assert_eq!(top0.as_cyclic(), Some(3));
        // Part 0's lower layer keeps even ranks: unbounded, non-final.
        assert!(p0.validate().is_valid());
        // Parts beyond the finite final layer end in one odd-rank factor.
        for n in 1..5u64 {
            let p = plan.part(n);
            assert_eq!(torsion_type(&p), OrdinalCNF::finite(1));
            let top = p.torsion_seq().entry_at(&OrdinalCNF::zero()).unwrap();
            let exp = top.as_cyclic().expect("cyclic top");
            assert_eq!(exp % 2, 1, "odd support ranks of an all-ones layer are odd exponents");
        }
        for k in [0, 1, 2, 4] {
            check_law(&plan, k);
        }
    }

    #[test]
    fn refusals_are_reported_as_not_decomposable() {
        // Finite first layer.
        let d = ProPDescriptor::new(
            2,
            TorsionSequence::from_layers(vec![CartesianDescriptor::cyclic(2, 1).unwrap()])
                .unwrap(),
            Finite(0),
        )
        .unwrap();
        let err = DecompositionPlan::new(&d, DecompositionStyle::Default).unwrap_err();
        assert!(err.to_string().starts_with("not decomposable:"));
        // Empty sequence.
        let free = ProPDescriptor::free(2, Aleph0).unwrap();
        let err = DecompositionPlan::new(&free, DecompositionStyle::Default).unwrap_err();
        assert!(err.to_string().contains("empty"));
        // Cyclic tops on a limit type.
        let lim = ProPDescriptor::new(
            2,
            TorsionSequence::from_segments(vec![Segment::Omega {
                prefix: Vec::new(),
                repeating: full(2),
            }])
            .unwrap(),
            Finite(0),
        )
        .unwrap();
        let err = DecompositionPlan::new(&lim, DecompositionStyle::CyclicTops).unwrap_err();
        assert!(err.to_string().contains("successor"));
        // Invalid sequences are refused outright.
        let invalid = ProPDescriptor::new(
            2,
            TorsionSequence::from_layers(vec![
                CartesianDescriptor::cyclic(2, 1).unwrap(),
                full(2),
            ])
            .unwrap(),
            Finite(0),
        )
        .unwrap();
        let err = DecompositionPlan::new(&invalid, DecompositionStyle::Default).unwrap_err();
        assert!(err.to_string().starts_with("invalid torsion sequence:"));
    }

    #[test]
    fn deep_sequences_split_everywhere_at_once() {
        // Type omega*2 + 1: two omega-runs and a bounded-infinite final.
        let f = CartesianDescriptor::new(
            2,
            MultiplicitySeq::new(vec![Aleph0], Tail::Zero),
        )
        .unwrap();
        let seq = TorsionSequence::from_segments(vec![
            Segment::Omega { prefix: Vec::new(), repeating: full(2) },
            Segment::Omega {
                prefix: vec![full(2).product(&full(2)).unwrap()],
                repeating: full(2),
            },
            Segment::Run(vec![f]),
        ])
        .unwrap();
        let d = ProPDescriptor::new(2, seq, Finite(5)).unwrap();
        assert_eq!(torsion_type(&d), OrdinalCNF::monomial(1, 2).successor());
        let plan = DecompositionPlan::new(&d, DecompositionStyle::Default).unwrap();
        for n in 0..3 {
            assert!(plan.part(n).validate().is_valid());
            assert_eq!(torsion_type(&plan.part(n)), torsion_type(&d));
        }
        for k in [0, 1, 2, 3] {
            check_law(&plan, k);
        }
    }
}
