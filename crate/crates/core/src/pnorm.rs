use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent `p` in `[1, inf]` of the partition energy.
///
/// Serialises as a number, or the string `"inf"` for `p = inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PNorm(f64);

impl PNorm {
    pub const INF: PNorm = PNorm(f64::INFINITY);
    pub const ONE: PNorm = PNorm(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidConfig(format!("p must lie in [1, inf], got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }

    /// `(sum v^p)^(1/p)` or `max v`; evaluated with scaling so large `p` cannot overflow.
    pub fn norm(self, values: &[f64]) -> f64 {
        let m = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if self.is_inf() || m == 0.0 || !m.is_finite() {
            return m;
        }
        let s: f64 = values.iter().map(|v| (v.abs() / m).powf(self.0)).sum();
        m * s.powf(1.0 / self.0)
    }

    /// `k^(1/p)`, the Hölder factor between the p- and max-norms.
    pub fn holder_factor(self, k: usize) -> f64 {
        if self.is_inf() {
            1.0
        } else {
            (k as f64).powf(1.0 / self.0)
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::INF),
            t => t
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse p = '{s}'")))
                .and_then(Self::new),
        }
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_inf() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => PNorm::new(p).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Serde helper writing non-finite floats as `"inf"`, `"-inf"` or `"nan"`.
pub mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("not a number: {t}"))),
            },
        }
    }
}

/// As [`float_or_inf`] for optional values.
pub mod opt_float_or_inf {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::float_or_inf")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        assert_eq!(PNorm::ONE.norm(&[5.0, 5.0]), 10.0);
        assert_eq!(PNorm::INF.norm(&[3.0, 5.0]), 5.0);
        let p2 = PNorm::new(2.0).unwrap().norm(&[3.0, 4.0]);
        assert!((p2 - 5.0).abs() < 1e-14);
        let big = PNorm::new(1e6).unwrap().norm(&[1e300, 1e300]);
        assert!(big.is_finite());
    }

    #[test]
    fn serde_round_trip() {
        assert_eq!(serde_json::to_string(&PNorm::INF).unwrap(), "\"inf\"");
        let p: PNorm = serde_json::from_str("2.0").unwrap();
        assert_eq!(p.value(), 2.0);
        assert!(serde_json::from_str::<PNorm>("0.5").is_err());
        let p: PNorm = serde_json::from_str("\"inf\"").unwrap();
        assert!(p.is_inf());
    }
}
