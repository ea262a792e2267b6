use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact outcome probabilities, or empirical frequencies from a finite
/// number of detection events. Serializes as `"exact"` or an integer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Shots {
    #[default]
    Exact,
    Count(u64),
}

impl Serialize for Shots {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Count(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ShotsVisitor;
        impl Visitor<'_> for ShotsVisitor {
            type Value = Shots;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"exact\" or a positive integer")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Shots, E> {
                if v == 0 {
                    return Err(E::custom("shots must be positive"));
                }
                Ok(Shots::Count(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Shots, E> {
                u64::try_from(v).map_err(|_| E::custom("shots must be positive")).and_then(|v| self.visit_u64(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Shots, E> {
                if v == "exact" {
                    return Ok(Shots::Exact);
                }
                v.parse::<u64>()
                    .map_err(|_| E::custom(format!("expected \"exact\" or an integer, got {v:?}")))
                    .and_then(|n| self.visit_u64(n))
            }
        }
        d.deserialize_any(ShotsVisitor)
    }
}

impl std::str::FromStr for Shots {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exact" {
            return Ok(Shots::Exact);
        }
        match s.parse::<u64>() {
            Ok(0) | Err(_) => Err(format!("expected \"exact\" or a positive integer, got {s:?}")),
            Ok(n) => Ok(Shots::Count(n)),
        }
    }
}
