//! Shared verification suites.
//!
//! Each suite runs a family of exact, deterministic checks over a swept
//! parameter range — the annihilator law against the scaled dual, the
//! shift-difference map on truncated towers, the depth condition for
//! default diagonals, and constructor round trips over a generated corpus —
//! and reports every failing case.  The command-line `verify` command and
//! the acceptance tests share these suites, so the same evidence backs
//! both.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cardinal::{Aleph0, CardinalCount, Finite};
use crate::construct::diagonal::{check_delta_condition, theta_truncated};
use crate::construct::materialize::materialize;
use crate::construct::{
    construct, construction_case, verify_construction_symbolic, ConstructionCase,
    PresentationTree,
};
use crate::descriptor::ProPDescriptor;
use crate::error::Error;
use crate::finite::character::{annihilator, characters, scaled_characters};
use crate::finite::subgroup::torsion_subgroup_gens;
use crate::finite::FiniteAbelianPGroup;
use crate::multiplicity::{CartesianDescriptor, MultiplicitySeq, Tail};
use crate::sequence::{Segment, TorsionSequence};

/// The result of one suite: how many cases ran and which failed.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    /// The suite's registered name.
    pub name: &'static str,
    /// How many individual checks ran.
    pub cases: u64,
    /// A description of every failing check, in run order.
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        SuiteOutcome { name, cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    /// True when every check passed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Names accepted by [`run_suite`], in canonical order.
pub const SUITE_NAMES: &[&str] = &["annihilator", "theta", "delta", "roundtrip"];

/// Run the named suite; `None` if the name is unknown.
pub fn run_suite(name: &str) -> Option<Result<SuiteOutcome, Error>> {
    match name {
        "annihilator" => Some(annihilator_suite()),
        "theta" => Some(theta_suite()),
        "delta" => Some(delta_suite()),
        "roundtrip" => Some(roundtrip_suite()),
        _ => None,
    }
}

/// Run every registered suite in order.
pub fn run_all_suites() -> Result<Vec<SuiteOutcome>, Error> {
    SUITE_NAMES
        .iter()
        .map(|name| run_suite(name).expect("registered suite"))
        .collect()
}

/// All partitions of `total` into non-increasing positive parts.
///
/// `partitions_of(0)` is the singleton list holding the empty partition,
/// matching the trivial group.
pub fn partitions_of(total: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for next in (1..=rest.min(max)).rev() {
            cur.push(next);
            go(rest - next, next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, total, &mut Vec::new(), &mut out);
    out
}

/// Every abelian p-group of order at most `bound`, one per partition.
pub fn groups_up_to_order(prime: u64, bound: &BigInt) -> Result<Vec<FiniteAbelianPGroup>, Error> {
    let mut out = Vec::new();
    let mut k = 0u32;
    while &BigInt::from(prime).pow(k) <= bound {
        for exps in partitions_of(k) {
            out.push(FiniteAbelianPGroup::new(prime, exps)?);
        }
        k += 1;
    }
    Ok(out)
}

/// The annihilator law: `Ann(G[n]) = n G*` for every p-power `n` up to the
/// exponent of `G`, over all groups of order at most `2^8` at `p = 2, 3`.
pub fn annihilator_suite() -> Result<SuiteOutcome, Error> {
    let mut out = SuiteOutcome::new("annihilator");
    let bound = BigInt::from(1u64 << 8);
    for p in [2u64, 3] {
        for g in groups_up_to_order(p, &bound)? {
            let chars = characters(&g)?;
            let exponent = g.exponents().first().copied().unwrap_or(0);
            for j in 0..=exponent {
                let torsion_gens = torsion_subgroup_gens(&g, j);
                let mut ann = annihilator(&chars, &torsion_gens);
                ann.sort();
                let scaled = scaled_characters(&chars, p.pow(j));
                out.check(ann == scaled, || {
                    format!(
                        "annihilator law fails for p={p}, exponents {:?}, n={p}^{j}",
                        g.exponents()
                    )
                });
            }
        }
    }
    Ok(out)
}

/// The shift-difference map on truncated towers: surjective, kernel of
/// order `p^(n+1)`, and the kernel is exactly the span of the diagonal.
pub fn theta_suite() -> Result<SuiteOutcome, Error> {
    let mut out = SuiteOutcome::new("theta");
    for p in [2u64, 3, 5] {
        for n in 1..=6u32 {
            let theta = theta_truncated(p, n)?;
            out.check(theta.is_surjective()?, || {
                format!("theta is not surjective for p={p}, n={n}")
            });
            let expected = BigInt::from(p).pow(n + 1);
            let kernel = theta.kernel_order()?;
            out.check(kernel == expected, || {
                format!("kernel order is {kernel}, not {p}^{} for p={p}, n={n}", n + 1)
            });
            let eta = theta.eta();
            let image = theta.apply(&eta);
            out.check(image == theta.codomain().zero(), || {
                format!("the diagonal is not in the kernel for p={p}, n={n}")
            });
            // The diagonal's order equals the kernel order, so its span is
            // the whole kernel.
            let eta_order = theta.domain().element_order_exp(&eta);
            out.check(eta_order == n + 1, || {
                format!("the diagonal has order {p}^{eta_order}, not {p}^{} for n={n}", n + 1)
            });
        }
    }
    Ok(out)
}

/// The depth condition: over the full tower, the default diagonal avoids
/// `pH + H[p^(level-1)]` at every level from 2 to 8, for `p = 2, 3`; a
/// p-divisible element never does.
pub fn delta_suite() -> Result<SuiteOutcome, Error> {
    let mut out = SuiteOutcome::new("delta");
    for p in [2u64, 3] {
        let seq = TorsionSequence::from_layers(vec![
            CartesianDescriptor::full(p)?,
            CartesianDescriptor::cyclic(p, 2)?,
        ])?;
        let d = ProPDescriptor::new(p, seq, CardinalCount::ZERO)?;
        let tree = construct(&d)?;
        let PresentationTree::Extension { child, diagonal, .. } = &tree else {
            out.check(false, || {
                format!("the two-layer descriptor for p={p} did not build an extension")
            });
            continue;
        };
        for level in 2..=8u32 {
            let base = materialize(child, level, 2)?;
            let delta = diagonal.element(&base.group, &base.top_gens)?;
            let deep = check_delta_condition(&base.group, &delta, level)?;
            out.check(deep, || {
                format!("the default diagonal fails the depth condition at p={p}, level {level}")
            });
            let shallow = base.group.scalar_mul(p, &delta);
            let divisible = check_delta_condition(&base.group, &shallow, level)?;
            out.check(!divisible, || {
                format!("a p-divisible element passes the depth condition at p={p}, level {level}")
            });
        }
    }
    Ok(out)
}

/// Constructor round trips over a generated corpus: realizing the tree of a
/// valid descriptor reproduces the descriptor, across all construction
/// cases and torsion types up to omega + 2.
pub fn roundtrip_suite() -> Result<SuiteOutcome, Error> {
    let mut out = SuiteOutcome::new("roundtrip");
    let mut seen = [0u64; 6];
    let mut index = 0usize;
    for p in [2u64, 3] {
        for d in descriptor_corpus(p, 60, 0x5eed ^ p)? {
            let case = construction_case(d.torsion_seq())?;
            seen[case_index(case)] += 1;
            let tree = construct(&d)?;
            let realized = verify_construction_symbolic(&tree)?;
            out.check(realized == d, || {
                format!("round trip failed for corpus descriptor {index} ({case:?}) at p={p}")
            });
            index += 1;
        }
    }
    for (i, count) in seen.iter().enumerate() {
        out.check(*count > 0, || {
            format!("the corpus never exercised construction case {i}")
        });
    }
    Ok(out)
}

fn case_index(case: ConstructionCase) -> usize {
    match case {
        ConstructionCase::SingleLayer => 0,
        ConstructionCase::CyclicExtension => 1,
        ConstructionCase::FlattenedProduct => 2,
        ConstructionCase::LimitProduct => 3,
        ConstructionCase::DiagonalLimitExtension => 4,
        ConstructionCase::FlattenedLimitProduct => 5,
    }
}

/// A deterministic corpus of `count` valid torsion-only descriptors at the
/// given prime, with torsion type at most omega + 2, cycling through all
/// construction cases.
pub fn descriptor_corpus(
    prime: u64,
    count: usize,
    seed: u64,
) -> Result<Vec<ProPDescriptor>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let shape = out.len() % 6;
        let seq = random_sequence(&mut rng, prime, shape)?;
        let d = ProPDescriptor::new(prime, seq, CardinalCount::ZERO)?;
        if d.validate().is_valid() && !d.torsion_seq().is_empty() {
            out.push(d);
        }
    }
    Ok(out)
}

fn random_sequence(
    rng: &mut ChaCha8Rng,
    p: u64,
    shape: usize,
) -> Result<TorsionSequence, Error> {
    let mut segments = Vec::new();
    match shape {
        // A single layer: any nontrivial final layer.
        0 => segments.push(Segment::Run(vec![random_final_layer(rng, p)?])),
        // A cyclic top over one unbounded layer, or over a limit base.
        1 => {
            if rng.gen_bool(0.5) {
                segments.push(random_omega(rng, p)?);
            }
            segments.push(Segment::Run(vec![
                random_unbounded_layer(rng, p)?,
                random_cyclic_layer(rng, p)?,
            ]));
        }
        // A non-cyclic top over one unbounded layer, or over a limit base.
        2 => {
            if rng.gen_bool(0.5) {
                segments.push(random_omega(rng, p)?);
            }
            segments.push(Segment::Run(vec![
                random_unbounded_layer(rng, p)?,
                random_noncyclic_layer(rng, p)?,
            ]));
        }
        // A pure limit.
        3 => segments.push(random_omega(rng, p)?),
        // A cyclic top directly over a limit.
        4 => {
            segments.push(random_omega(rng, p)?);
            segments.push(Segment::Run(vec![random_cyclic_layer(rng, p)?]));
        }
        // A non-cyclic top directly over a limit.
        _ => {
            segments.push(random_omega(rng, p)?);
            segments.push(Segment::Run(vec![random_noncyclic_layer(rng, p)?]));
        }
    }
    TorsionSequence::from_segments(segments)
}

fn random_omega(rng: &mut ChaCha8Rng, p: u64) -> Result<Segment, Error> {
    let prefix_len = rng.gen_range(0..=2);
    let mut prefix = Vec::new();
    for _ in 0..prefix_len {
        prefix.push(random_unbounded_layer(rng, p)?);
    }
    Ok(Segment::Omega { prefix, repeating: random_unbounded_layer(rng, p)? })
}

fn random_count(rng: &mut ChaCha8Rng) -> CardinalCount {
    match rng.gen_range(0..4) {
        0 => Finite(0),
        1 => Finite(1),
        2 => Finite(2),
        _ => Aleph0,
    }
}

fn random_unbounded_layer(
    rng: &mut ChaCha8Rng,
    p: u64,
) -> Result<CartesianDescriptor, Error> {
    let prefix: Vec<CardinalCount> =
        (0..rng.gen_range(0..=2)).map(|_| random_count(rng)).collect();
    let tail = if rng.gen_bool(0.3) {
        Tail::AllAleph0
    } else {
        let len = rng.gen_range(1..=2);
        let mut pattern: Vec<CardinalCount> =
            (0..len).map(|_| random_count(rng)).collect();
        if pattern.iter().all(|c| c.is_zero()) {
            pattern[0] = Finite(1);
        }
        Tail::Periodic(pattern)
    };
    CartesianDescriptor::new(p, MultiplicitySeq::new(prefix, tail))
}

fn random_cyclic_layer(
    rng: &mut ChaCha8Rng,
    p: u64,
) -> Result<CartesianDescriptor, Error> {
    CartesianDescriptor::cyclic(p, rng.gen_range(1..=4))
}

fn random_noncyclic_layer(
    rng: &mut ChaCha8Rng,
    p: u64,
) -> Result<CartesianDescriptor, Error> {
    match rng.gen_range(0..3) {
        0 => random_unbounded_layer(rng, p),
        1 => {
            let exp = rng.gen_range(1..=3);
            let count = if rng.gen_bool(0.5) { Finite(2) } else { Aleph0 };
            CartesianDescriptor::new(p, MultiplicitySeq::single(exp, count))
        }
        _ => CartesianDescriptor::new(
            p,
            MultiplicitySeq::new(vec![Finite(1), Finite(1)], Tail::Zero),
        ),
    }
}

fn random_final_layer(
    rng: &mut ChaCha8Rng,
    p: u64,
) -> Result<CartesianDescriptor, Error> {
    if rng.gen_bool(0.5) {
        random_unbounded_layer(rng, p)
    } else if rng.gen_bool(0.5) {
        random_cyclic_layer(rng, p)
    } else {
        random_noncyclic_layer(rng, p)
    }
}
