//! A calculus for countably based abelian pro-p groups.
//!
//! The crate represents such a group by a descriptor — a prime, an
//! ordinal-indexed torsion sequence of Cartesian layers, and a free rank —
//! and implements the operations the theory supports: the torsion series
//! and its layers, duality with countable discrete groups, isomorphism
//! classification (topological and abstract), embedding decisions with
//! finite witnesses, decompositions of infinite products, and explicit
//! constructions realizing a sequence, checkable on finite truncations.

pub mod cardinal;
pub mod construct;
pub mod decompose;
pub mod descriptor;
pub mod classify;
pub mod error;
pub mod finite;
pub mod multiplicity;
pub mod ordinal;
pub mod sequence;
pub mod suite;
pub mod torsion;

pub use cardinal::CardinalCount;
pub use construct::{construct, materialize, verify_construction_symbolic, ConstructionCase, DiagonalSpec, Family, FamilyScheme, MaterializedTree, PresentationTree};
pub use descriptor::{DiscreteDescriptor, ProPDescriptor};
pub use error::Error;
pub use multiplicity::{CartesianDescriptor, MultiplicitySeq, Tail};
pub use ordinal::OrdinalCNF;
pub use sequence::{Segment, TorsionSequence, ValidityReport, Violation, ViolationKind};
