//! Counting domain for factor multiplicities: the natural numbers together
//! with a single countably infinite value.
//!
//! Multiplicities of cyclic factors in a countably based group are either
//! finite or countably infinite, so this two-variant type is exact.  Addition
//! saturates at [`CardinalCount::Aleph0`].

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

/// A multiplicity: a finite count or the countable infinity.
///
/// The derived ordering places every finite value below `Aleph0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CardinalCount {
    /// An exact finite count (possibly zero).
    Finite(u64),
    /// The countably infinite count.
    Aleph0,
}

pub use CardinalCount::{Aleph0, Finite};

impl CardinalCount {
    /// The zero count.
    pub const ZERO: CardinalCount = Finite(0);
    /// The unit count.
    pub const ONE: CardinalCount = Finite(1);

    /// True when the count is zero.
    pub fn is_zero(self) -> bool {
        self == Finite(0)
    }

    /// True when the count is finite (including zero).
    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    /// The smaller of two counts.
    pub fn min(self, other: CardinalCount) -> CardinalCount {
        std::cmp::min(self, other)
    }

    /// Cap the count at a finite bound, for finite truncations.
    pub fn capped(self, cap: u64) -> u64 {
        match self {
            Finite(n) => n.min(cap),
            Aleph0 => cap,
        }
    }

    /// Subtract a finite amount, saturating at zero; `Aleph0` is unchanged.
    pub fn saturating_sub(self, amount: u64) -> CardinalCount {
        match self {
            Finite(n) => Finite(n.saturating_sub(amount)),
            Aleph0 => Aleph0,
        }
    }
}

impl Add for CardinalCount {
    type Output = CardinalCount;

    fn add(self, rhs: CardinalCount) -> CardinalCount {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a.checked_add(b).expect("count overflow")),
            _ => Aleph0,
        }
    }
}

impl Sum for CardinalCount {
    fn sum<I: Iterator<Item = CardinalCount>>(iter: I) -> CardinalCount {
        iter.fold(Finite(0), |a, b| a + b)
    }
}

impl fmt::Display for CardinalCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(n) => write!(f, "{n}"),
            Aleph0 => write!(f, "aleph0"),
        }
    }
}

// Canonical JSON form: {"fin": n} for finite counts, the string "aleph0"
// for the infinite one.
impl Serialize for CardinalCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(n) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("fin", n)?;
                map.end()
            }
            Aleph0 => serializer.serialize_str("aleph0"),
        }
    }
}

impl<'de> Deserialize<'de> for CardinalCount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CountVisitor;

        impl<'de> Visitor<'de> for CountVisitor {
            type Value = CardinalCount;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("{\"fin\": n} or the string \"aleph0\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<CardinalCount, E> {
                if v == "aleph0" {
                    Ok(Aleph0)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_map<A: de::MapAccess<'de>>(self, mut map: A) -> Result<CardinalCount, A::Error> {
                let key: String = map
                    .next_key()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                if key != "fin" {
                    return Err(de::Error::unknown_field(&key, &["fin"]));
                }
                let value: u64 = map.next_value()?;
                Ok(Finite(value))
            }
        }

        deserializer.deserialize_any(CountVisitor)
    }
}
