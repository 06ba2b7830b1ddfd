//! The torsion calculus on descriptors.
//!
//! The torsion series of a group refines through its ordinal-indexed
//! stages; each stage quotients off the closure of the torsion so far.  On
//! descriptors this is pure sequence surgery: the layer at a stage is the
//! entry there, and the remainder is the sequence shifted past it with the
//! free rank untouched.

use crate::descriptor::{DiscreteDescriptor, ProPDescriptor};
use crate::error::Error;
use crate::multiplicity::CartesianDescriptor;
use crate::ordinal::OrdinalCNF;

/// The layer and remainder of the torsion series at one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesData {
    /// The closure of the torsion of the remainder at the previous stages:
    /// the Cartesian layer sitting at this index.
    pub layer: CartesianDescriptor,
    /// The group with the first `index` stages quotiented away.
    pub remainder: ProPDescriptor,
}

/// The closure of the torsion subgroup: the first layer of the sequence.
pub fn closure_of_torsion(d: &ProPDescriptor) -> CartesianDescriptor {
    d.torsion_seq()
        .entry_at(&OrdinalCNF::zero())
        .unwrap_or_else(|| CartesianDescriptor::trivial(d.prime()).expect("prime is validated"))
}

/// The torsion type: the least stage at which the series stabilizes, which
/// is the order type of the torsion sequence.
pub fn torsion_type(d: &ProPDescriptor) -> OrdinalCNF {
    d.torsion_seq().order_type()
}

/// The torsion series data at stage `index`.
///
/// Errors when `index` exceeds the torsion type; at the type itself the
/// layer is trivial and the remainder is torsion-free.
pub fn torsion_series_data(d: &ProPDescriptor, index: &OrdinalCNF) -> Result<SeriesData, Error> {
    let shifted = d.torsion_seq().shift(index)?;
    let layer = shifted
        .entry_at(&OrdinalCNF::zero())
        .unwrap_or_else(|| CartesianDescriptor::trivial(d.prime()).expect("prime is validated"));
    Ok(SeriesData { layer, remainder: d.with_torsion_seq(shifted)? })
}

/// The product of two groups, descriptor-wise: torsion sequences multiply
/// termwise and free ranks add.
pub fn product(a: &ProPDescriptor, b: &ProPDescriptor) -> Result<ProPDescriptor, Error> {
    if a.prime() != b.prime() {
        return Err(Error::MixedPrimes(a.prime(), b.prime()));
    }
    let seq = a.torsion_seq().termwise_product(b.torsion_seq())?;
    ProPDescriptor::new(a.prime(), seq, a.free_rank() + b.free_rank())
}

/// The product of any number of descriptors over one prime.
pub fn product_of(parts: &[ProPDescriptor]) -> Result<ProPDescriptor, Error> {
    let Some((first, rest)) = parts.split_first() else {
        return Err(Error::Construction("product of no descriptors".into()));
    };
    rest.iter().try_fold(first.clone(), |acc, d| product(&acc, d))
}

/// The Pontryagin dual: a countable discrete torsion-plus-divisible group
/// carrying the same sequence as Ulm data and the free rank as divisible
/// rank.
pub fn dual(d: &ProPDescriptor) -> DiscreteDescriptor {
    DiscreteDescriptor::new(d.prime(), d.torsion_seq().clone(), d.free_rank())
        .expect("descriptor data is already validated")
}

/// The dual of a discrete descriptor, back on the pro-p side.
pub fn dual_discrete(dd: &DiscreteDescriptor) -> ProPDescriptor {
    ProPDescriptor::new(dd.prime(), dd.ulm_seq().clone(), dd.divisible_rank())
        .expect("descriptor data is already validated")
}
