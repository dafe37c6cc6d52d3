//! Real numbers extended by `+inf` and `-inf`.
//!
//! Infinite values are never stored as IEEE infinities.  Products and powers
//! follow the measure-theoretic conventions `0 * inf = 0` and `inf^0 = 1`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

use ExtendedReal::*;

impl ExtendedReal {
    /// Wraps a float, mapping IEEE infinities to the matching sentinel.
    /// NaN is not representable and panics.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "ExtendedReal cannot hold NaN");
        if x == f64::INFINITY {
            PosInf
        } else if x == f64::NEG_INFINITY {
            NegInf
        } else {
            Finite(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Lossy conversion for plotting and comparisons against plain floats.
    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(x) => x,
            PosInf => f64::INFINITY,
        }
    }

    pub fn neg(self) -> Self {
        match self {
            NegInf => PosInf,
            Finite(x) => Finite(-x),
            PosInf => NegInf,
        }
    }

    /// Product with `0 * (+-inf) = 0`.
    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a * b),
            (Finite(a), inf) | (inf, Finite(a)) => {
                if a == 0.0 {
                    Finite(0.0)
                } else if a > 0.0 {
                    inf
                } else {
                    inf.neg()
                }
            }
            (a, b) => {
                if a == b {
                    PosInf
                } else {
                    NegInf
                }
            }
        }
    }

    /// Sum; `+inf + -inf` has no meaningful value and panics.
    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => panic!("inf - inf is undefined"),
            (Finite(_), inf) | (inf, Finite(_)) => inf,
            (a, _) => a,
        }
    }

    /// `self^p` for a nonnegative base, with `inf^0 = 1` and `inf^p = inf`
    /// for `p > 0`.
    pub fn powf(self, p: f64) -> Self {
        match self {
            Finite(x) => Finite(x.powf(p)),
            PosInf => {
                if p == 0.0 {
                    Finite(1.0)
                } else if p > 0.0 {
                    PosInf
                } else {
                    Finite(0.0)
                }
            }
            NegInf => panic!("negative infinite base in powf"),
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (PosInf, _) | (_, NegInf) => Some(Ordering::Greater),
        }
    }
}

impl PartialEq<f64> for ExtendedReal {
    fn eq(&self, other: &f64) -> bool {
        *self == ExtendedReal::from_f64(*other)
    }
}

impl PartialOrd<f64> for ExtendedReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        if other.is_nan() {
            return None;
        }
        self.partial_cmp(&ExtendedReal::from_f64(*other))
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            Finite(x) => fmt::Display::fmt(x, f),
            PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NegInf => s.serialize_str("-inf"),
            Finite(x) => s.serialize_f64(*x),
            PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Finite(x)),
            Repr::Str(s) => match s.as_str() {
                "+inf" | "inf" => Ok(PosInf),
                "-inf" => Ok(NegInf),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number, \"+inf\" or \"-inf\", got {other:?}"
                ))),
            },
        }
    }
}
