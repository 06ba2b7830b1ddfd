//! Canonical text rendering of descriptors.
//!
//! The printer is a function of the descriptor alone, so equal descriptors
//! print identically, and printing after a parse-lower round trip is
//! idempotent.  Common layers get their short forms — `C(p,e)^k` for a
//! single cyclic block, `prod(C(p,i) for i in N)^k` for constant
//! multiplicities — and everything else falls back to the explicit
//! `layer(p,[...],tail)` literal.

use propg_core::{
    CardinalCount, CartesianDescriptor, ProPDescriptor, Segment, Tail, TorsionSequence,
};
use std::fmt::Write;

/// Canonical text for a descriptor; parsing it back lowers to an equal one.
pub fn print_descriptor(d: &ProPDescriptor) -> String {
    if d.is_trivial() {
        return format!("trivial({})", d.prime());
    }
    let mut parts = Vec::new();
    if !d.torsion_seq().is_empty() {
        parts.push(print_sequence(d.torsion_seq()));
    }
    if !d.free_rank().is_zero() {
        parts.push(format!("Zp({})^{}", d.prime(), d.free_rank()));
    }
    parts.join(" * ")
}

/// Canonical `seq[...]` text for a nonempty torsion sequence.
pub fn print_sequence(seq: &TorsionSequence) -> String {
    let mut items = Vec::new();
    for segment in seq.segments() {
        match segment {
            Segment::Run(layers) => {
                for layer in layers {
                    items.push(print_layer(layer));
                }
            }
            Segment::Omega { prefix, repeating } => {
                for layer in prefix {
                    items.push(print_layer(layer));
                }
                items.push(format!("repeat({})", print_layer(repeating)));
            }
        }
    }
    format!("seq[{}]", items.join(", "))
}

/// Canonical text for one Cartesian layer.
pub fn print_layer(layer: &CartesianDescriptor) -> String {
    let p = layer.prime();
    let mults = layer.mults();
    let prefix = mults.prefix();
    match (prefix, mults.tail()) {
        ([], Tail::Zero) => format!("layer({p},[],zero)"),
        ([], Tail::AllAleph0) => format!("prod(C({p},i) for i in N)^aleph0"),
        ([], Tail::Periodic(pattern)) => match pattern.as_slice() {
            [CardinalCount::Finite(1)] => format!("prod(C({p},i) for i in N)"),
            [CardinalCount::Finite(k)] => format!("prod(C({p},i) for i in N)^{k}"),
            _ => general(p, prefix, mults.tail()),
        },
        (_, Tail::Zero) if prefix[..prefix.len() - 1].iter().all(|c| c.is_zero()) => {
            let e = prefix.len();
            match prefix[e - 1] {
                CardinalCount::Finite(1) => format!("C({p},{e})"),
                count => format!("C({p},{e})^{count}"),
            }
        }
        _ => general(p, prefix, mults.tail()),
    }
}

fn general(p: u64, prefix: &[CardinalCount], tail: &Tail) -> String {
    let mut out = format!("layer({p},[");
    for (i, count) in prefix.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{count}");
    }
    out.push_str("],");
    match tail {
        Tail::Zero => out.push_str("zero"),
        Tail::AllAleph0 => out.push_str("aleph0"),
        Tail::Periodic(pattern) => {
            out.push_str("rep[");
            for (i, count) in pattern.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{count}");
            }
            out.push(']');
        }
    }
    out.push(')');
    out
}
