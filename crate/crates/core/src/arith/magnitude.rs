//! Non-negative magnitudes that degrade from exact to enclosed to log-domain.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::interval::Interval;
use super::logmag::LogMagnitude;
use super::{as_string, Rational};
use crate::error::{Error, Result};

/// Below this many bits of binary exponent an enclosure is stored as a log.
pub const LOG_SWITCH_BITS: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tier", content = "value", rename_all = "snake_case")]
pub enum Magnitude {
    Zero,
    /// An exact rational value.
    #[serde(with = "as_string")]
    Exact(Rational),
    /// The square root of an exact rational.
    #[serde(with = "as_string")]
    Sqrt(Rational),
    Enclosed(Interval),
    Log(LogMagnitude),
}

impl Magnitude {
    /// Pick the enclosure tier for a non-negative interval.
    pub fn from_interval(i: Interval) -> Result<Magnitude> {
        if i.is_zero() {
            return Ok(Magnitude::Zero);
        }
        if i.lo().is_negative() {
            return Err(Error::domain("magnitude enclosure has a negative endpoint"));
        }
        if i.hi() < &Dyadic::pow2(-LOG_SWITCH_BITS) && i.is_positive() {
            return Ok(Magnitude::Log(LogMagnitude::from_interval(&i)?));
        }
        Ok(Magnitude::Enclosed(i))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Magnitude::Zero => true,
            Magnitude::Exact(r) | Magnitude::Sqrt(r) => r.is_zero(),
            Magnitude::Enclosed(i) => i.is_zero(),
            Magnitude::Log(l) => l.is_zero(),
        }
    }

    /// Certainly strictly positive.
    pub fn is_positive(&self) -> bool {
        match self {
            Magnitude::Zero => false,
            Magnitude::Exact(r) | Magnitude::Sqrt(r) => r.is_positive(),
            Magnitude::Enclosed(i) => i.is_positive(),
            Magnitude::Log(l) => !l.is_zero(),
        }
    }

    pub fn to_interval(&self, prec: u32) -> Result<Interval> {
        match self {
            Magnitude::Zero => Ok(Interval::zero(prec)),
            Magnitude::Exact(r) => Ok(Interval::from_rational(r, prec)),
            Magnitude::Sqrt(r) => Interval::sqrt_rational(r, prec),
            Magnitude::Enclosed(i) => Ok(i.clone()),
            Magnitude::Log(l) => l.to_interval(prec),
        }
    }

    pub fn to_log(&self, prec: u32) -> Result<LogMagnitude> {
        match self {
            Magnitude::Zero => Ok(LogMagnitude::zero()),
            Magnitude::Exact(r) => LogMagnitude::from_rational(r, prec),
            Magnitude::Sqrt(r) => Ok(LogMagnitude::from_rational(r, prec)?.root(2, prec)),
            Magnitude::Enclosed(i) => {
                if i.is_positive() {
                    LogMagnitude::from_interval(i)
                } else {
                    Err(Error::precision("enclosure touches zero; no log bound"))
                }
            }
            Magnitude::Log(l) => Ok(l.clone()),
        }
    }

    /// Rough value for display; saturates to 0 for log-tier magnitudes.
    pub fn approx_f64(&self) -> f64 {
        match self {
            Magnitude::Log(l) => l.approx_log2().exp2(),
            other => other
                .to_interval(64)
                .map(|i| i.mid_f64())
                .unwrap_or(f64::NAN),
        }
    }

    pub fn approx_log2(&self) -> f64 {
        match self {
            Magnitude::Log(l) => l.approx_log2(),
            other => other.approx_f64().log2(),
        }
    }

    pub fn tier(&self) -> &'static str {
        match self {
            Magnitude::Zero => "zero",
            Magnitude::Exact(_) => "exact",
            Magnitude::Sqrt(_) => "sqrt",
            Magnitude::Enclosed(_) => "enclosed",
            Magnitude::Log(_) => "log",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn tiny_enclosures_move_to_log_tier() {
        let tiny = Interval::point(Dyadic::pow2(-100), 64);
        assert_eq!(Magnitude::from_interval(tiny).unwrap().tier(), "log");
        let ok = Interval::from_rational(&rat(1, 3), 64);
        assert_eq!(Magnitude::from_interval(ok).unwrap().tier(), "enclosed");
    }

    #[test]
    fn sqrt_tier_encloses_root() {
        let m = Magnitude::Sqrt(rat(3, 1));
        assert!(m.to_interval(64).unwrap().contains_f64(3f64.sqrt()) || (m.approx_f64() - 3f64.sqrt()).abs() < 1e-15);
        let l = m.to_log(64).unwrap();
        assert!((l.approx_log2() - 3f64.log2() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        for m in [
            Magnitude::Zero,
            Magnitude::Exact(rat(2, 1)),
            Magnitude::Sqrt(rat(3, 1)),
            Magnitude::Enclosed(Interval::from_rational(&rat(1, 7), 64)),
        ] {
            let s = serde_json::to_string(&m).unwrap();
            let back: Magnitude = serde_json::from_str(&s).unwrap();
            assert_eq!(back, m);
            assert_eq!(serde_json::to_string(&back).unwrap(), s);
        }
    }
}
