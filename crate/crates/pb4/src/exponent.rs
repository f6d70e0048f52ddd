use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integrability exponent `q` with `1 <= q`, or the supremum-norm symbol.
///
/// The infinite branch is always handled separately (max of absolute
/// values), never as a large finite exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const INF: Exponent = Exponent::Infinity;

    pub fn finite(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::param("q", "must be a finite real or \"inf\""));
        }
        if q < 1.0 {
            return Err(Error::param("q", format!("must satisfy q >= 1, got {q}")));
        }
        Ok(Exponent::Finite(q))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn finite_value(self) -> Option<f64> {
        match self {
            Exponent::Finite(q) => Some(q),
            Exponent::Infinity => None,
        }
    }
}

/// `x^{1/q}` with the `q = 1` case kept exact.
pub(crate) fn qth_root(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else {
        x.powf(1.0 / q)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Exponent::Infinity);
        }
        let q: f64 = t
            .parse()
            .map_err(|_| Error::param("q", format!("cannot parse {t:?} as an exponent")))?;
        Exponent::finite(q)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(q) => serializer.serialize_f64(*q),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExpVisitor;

        impl Visitor<'_> for ExpVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a number q >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExpVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inf_and_numbers() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("INF".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("nan".parse::<Exponent>().is_err());
    }

    #[test]
    fn rejects_q_below_one() {
        assert!(Exponent::finite(0.99).is_err());
        assert!(Exponent::finite(f64::NAN).is_err());
        assert!(Exponent::finite(1.0).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let q: Exponent = serde_json::from_str("2.5").unwrap();
        assert_eq!(q, Exponent::Finite(2.5));
        let inf: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(inf, Exponent::Infinity);
        assert_eq!(serde_json::to_string(&inf).unwrap(), "\"inf\"");
    }
}
