//! Exact rationals, outward-rounded intervals and log-domain magnitudes.

pub mod dyadic;
pub mod interval;
pub mod logmag;
pub mod magnitude;
pub mod transcendental;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use dyadic::{Dyadic, Round};
pub use interval::Interval;
pub use logmag::{log2_of_product, Factor, LogMagnitude};
pub use magnitude::Magnitude;
pub use transcendental::{pi, sin_pi as interval_sin_pi};

pub type Rational = num_rational::BigRational;

/// Working precision used when nothing else is configured.
pub const DEFAULT_PRECISION: u32 = 128;

pub fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Distance from `x` to the nearest integer, in `[0, 1/2]`.
pub fn nearest_int_distance(x: &Rational) -> Rational {
    let f = frac(x);
    let g = Rational::one() - &f;
    if f <= g {
        f
    } else {
        g
    }
}

/// `2 sin(pi t)` for reduced `t` in `[0, 1/2]` when the value is a rational
/// or the square root of one (Niven's list).
pub fn two_sin_pi_exact(t: &Rational) -> Option<Magnitude> {
    let d = t.denom();
    let n = t.numer();
    if t.is_zero() {
        return Some(Magnitude::Zero);
    }
    if !n.is_one() {
        return None;
    }
    match d.to_string().as_str() {
        "2" => Some(Magnitude::Exact(int(2))),
        "3" => Some(Magnitude::Sqrt(int(3))),
        "4" => Some(Magnitude::Sqrt(int(2))),
        "6" => Some(Magnitude::Exact(int(1))),
        _ => None,
    }
}

/// `(cos 2 pi t, sin 2 pi t)` when both are rational, i.e. `4t` is an integer.
pub fn unit_root_rational(t: &Rational) -> Option<(Rational, Rational)> {
    let q = frac(t) * int(4);
    if !q.is_integer() {
        return None;
    }
    let k: BigInt = q.to_integer();
    let (c, s) = match k.mod_floor(&BigInt::from(4)).to_string().as_str() {
        "0" => (1, 0),
        "1" => (0, 1),
        "2" => (-1, 0),
        _ => (0, -1),
    };
    Some((int(c), int(s)))
}

/// Precision schedule: start, then doubled, up to a cap on refinements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start: u32,
    pub max_refinements: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start: DEFAULT_PRECISION,
            max_refinements: 8,
        }
    }
}

impl PrecisionPolicy {
    pub fn with_start(start: u32) -> Self {
        PrecisionPolicy {
            start: start.max(16),
            ..Default::default()
        }
    }

    pub fn schedule(&self) -> impl Iterator<Item = u32> {
        let start = self.start;
        (0..=self.max_refinements).map(move |i| start.saturating_mul(1 << i.min(20)))
    }

    /// Run `f` at each precision until it stops reporting a precision failure.
    pub fn refine<T>(&self, mut f: impl FnMut(u32) -> crate::Result<T>) -> crate::Result<T> {
        let mut last = None;
        for p in self.schedule() {
            match f(p) {
                Err(e) if e.is_precision_failure() => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("schedule is non-empty"))
    }
}

pub fn is_nonneg(x: &Rational) -> bool {
    !x.is_negative()
}

/// Serde adapters storing values through `Display`/`FromStr`, so big
/// integers and rationals appear in JSON as exact decimal strings.
pub mod as_string {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| s.parse().map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_some(&x.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Option::<String>::deserialize(d)?
                .map(|s| s.parse().map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}
