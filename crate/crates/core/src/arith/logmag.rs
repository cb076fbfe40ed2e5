//! Log-domain magnitudes.
//!
//! A [`LogMagnitude`] encloses `log2` of a non-negative quantity. It is the
//! only way to talk about numbers like `(1/2)^(2^2048)` whose binary
//! exponent does not fit in a machine word.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{Dyadic, Round};
use super::interval::Interval;
use super::transcendental::{exp2, log2_bigint, log2_interval, log2_rational};
use super::Rational;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct LogMagnitude {
    log2_lo: Dyadic,
    log2_hi: Dyadic,
    zero: bool,
}

impl LogMagnitude {
    pub fn zero() -> Self {
        LogMagnitude {
            log2_lo: Dyadic::zero(),
            log2_hi: Dyadic::zero(),
            zero: true,
        }
    }

    pub fn one() -> Self {
        LogMagnitude::from_log2(&Interval::zero(64))
    }

    /// The magnitude `2^v` for every `v` in the interval.
    pub fn from_log2(log2: &Interval) -> Self {
        LogMagnitude {
            log2_lo: log2.lo().clone(),
            log2_hi: log2.hi().clone(),
            zero: false,
        }
    }

    pub fn from_log2_bounds(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "log magnitude bounds out of order");
        LogMagnitude {
            log2_lo: lo,
            log2_hi: hi,
            zero: false,
        }
    }

    /// Log enclosure of a positive interval.
    pub fn from_interval(i: &Interval) -> Result<Self> {
        if i.is_zero() {
            return Ok(LogMagnitude::zero());
        }
        Ok(LogMagnitude::from_log2(&log2_interval(i)?))
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Result<Self> {
        if r.is_zero() {
            return Ok(LogMagnitude::zero());
        }
        Ok(LogMagnitude::from_log2(&log2_rational(&r.abs(), prec)?))
    }

    pub fn from_bigint(q: &BigInt, prec: u32) -> Result<Self> {
        if q.is_zero() {
            return Ok(LogMagnitude::zero());
        }
        Ok(LogMagnitude::from_log2(&log2_bigint(&q.abs(), prec)?))
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn log2_lo(&self) -> Option<&Dyadic> {
        (!self.zero).then_some(&self.log2_lo)
    }

    pub fn log2_hi(&self) -> Option<&Dyadic> {
        (!self.zero).then_some(&self.log2_hi)
    }

    pub fn log2(&self, prec: u32) -> Option<Interval> {
        (!self.zero).then(|| Interval::new(self.log2_lo.clone(), self.log2_hi.clone(), prec))
    }

    /// Midpoint of the log enclosure as an `f64`; `-inf` for zero.
    pub fn approx_log2(&self) -> f64 {
        if self.zero {
            return f64::NEG_INFINITY;
        }
        self.log2_lo
            .add_round(&self.log2_hi, 64, Round::Down)
            .shl(-1)
            .to_f64()
    }

    pub fn mul(&self, other: &LogMagnitude) -> LogMagnitude {
        if self.zero || other.zero {
            return LogMagnitude::zero();
        }
        let p = prec_of(self).max(prec_of(other));
        LogMagnitude {
            log2_lo: self.log2_lo.add_round(&other.log2_lo, p, Round::Down),
            log2_hi: self.log2_hi.add_round(&other.log2_hi, p, Round::Up),
            zero: false,
        }
    }

    pub fn recip(&self) -> Result<LogMagnitude> {
        if self.zero {
            return Err(Error::domain("reciprocal of zero magnitude"));
        }
        Ok(LogMagnitude {
            log2_lo: self.log2_hi.neg(),
            log2_hi: self.log2_lo.neg(),
            zero: false,
        })
    }

    pub fn div(&self, other: &LogMagnitude) -> Result<LogMagnitude> {
        Ok(self.mul(&other.recip()?))
    }

    /// `self^k` for an arbitrary-precision integer `k`.
    pub fn pow(&self, k: &BigInt, prec: u32) -> Result<LogMagnitude> {
        if self.zero {
            return if k.is_positive() {
                Ok(LogMagnitude::zero())
            } else if k.is_zero() {
                Ok(LogMagnitude::one())
            } else {
                Err(Error::domain("negative power of zero magnitude"))
            };
        }
        let l = Interval::new(self.log2_lo.clone(), self.log2_hi.clone(), prec).mul_int(k);
        Ok(LogMagnitude::from_log2(&l))
    }

    /// `self^(1/n)`.
    pub fn root(&self, n: u64, prec: u32) -> LogMagnitude {
        if self.zero {
            return LogMagnitude::zero();
        }
        let l = Interval::new(self.log2_lo.clone(), self.log2_hi.clone(), prec)
            .div(&Interval::from_int(n, prec))
            .expect("n > 0");
        LogMagnitude::from_log2(&l)
    }

    /// Enclosure of the sum of two non-negative magnitudes.
    pub fn add(&self, other: &LogMagnitude, prec: u32) -> LogMagnitude {
        if self.zero {
            return other.clone();
        }
        if other.zero {
            return self.clone();
        }
        // max <= log2(a + b) <= max + log2(1 + 2^-(gap)) <= max + 2^(1 - gap)
        let lo = self.log2_lo.clone().max(other.log2_lo.clone());
        let (big, small) = if self.log2_hi >= other.log2_hi {
            (&self.log2_hi, &other.log2_hi)
        } else {
            (&other.log2_hi, &self.log2_hi)
        };
        let gap = big.sub_round(small, 64, Round::Down);
        let bump = if gap < Dyadic::one() {
            Dyadic::one()
        } else if gap.msb().is_some_and(|m| m > 61) {
            Dyadic::pow2(-(1i64 << 61))
        } else {
            Dyadic::pow2(1 - gap.floor().try_into().unwrap_or(i64::MAX))
        };
        LogMagnitude {
            log2_lo: lo,
            log2_hi: big.add_round(&bump, prec, Round::Up),
            zero: false,
        }
    }

    /// Certified `self <= other`; `None` when the enclosures overlap.
    pub fn certainly_le(&self, other: &LogMagnitude) -> Option<bool> {
        match (self.zero, other.zero) {
            (true, _) => Some(true),
            (false, true) => Some(false),
            _ if self.log2_hi <= other.log2_lo => Some(true),
            _ if self.log2_lo > other.log2_hi => Some(false),
            _ => None,
        }
    }

    /// Certified `self < other`.
    pub fn certainly_lt(&self, other: &LogMagnitude) -> Option<bool> {
        match (self.zero, other.zero) {
            (true, true) => Some(false),
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ if self.log2_hi < other.log2_lo => Some(true),
            _ if self.log2_lo >= other.log2_hi => Some(false),
            _ => None,
        }
    }

    /// Is the magnitude certainly at least `2^bits`?
    pub fn exceeds_pow2(&self, bits: i64) -> bool {
        !self.zero && self.log2_lo >= Dyadic::from_int(bits)
    }

    /// Back to a linear-scale interval, when the exponent fits.
    pub fn to_interval(&self, prec: u32) -> Result<Interval> {
        if self.zero {
            return Ok(Interval::zero(prec));
        }
        exp2(&Interval::new(self.log2_lo.clone(), self.log2_hi.clone(), prec))
    }
}

fn prec_of(m: &LogMagnitude) -> u32 {
    let bits = |d: &Dyadic| d.mantissa().bits() as u32;
    bits(&m.log2_lo).max(bits(&m.log2_hi)).max(64)
}

impl fmt::Debug for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            write!(f, "LogMagnitude(0)")
        } else {
            write!(
                f,
                "LogMagnitude(2^[{:e}, {:e}])",
                self.log2_lo.to_f64(),
                self.log2_hi.to_f64()
            )
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LogRepr {
    log2_lo: Option<Dyadic>,
    log2_hi: Option<Dyadic>,
    #[serde(default, skip_deserializing)]
    approx_log2: Option<f64>,
}

impl Serialize for LogMagnitude {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LogRepr {
            log2_lo: self.log2_lo().cloned(),
            log2_hi: self.log2_hi().cloned(),
            approx_log2: (!self.zero).then(|| self.approx_log2()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogMagnitude {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = LogRepr::deserialize(d)?;
        match (r.log2_lo, r.log2_hi) {
            (None, None) => Ok(LogMagnitude::zero()),
            (Some(lo), Some(hi)) if lo <= hi => Ok(LogMagnitude::from_log2_bounds(lo, hi)),
            _ => Err(serde::de::Error::custom("malformed log magnitude")),
        }
    }
}

/// Base of one factor in [`log2_of_product`].
#[derive(Debug, Clone)]
pub enum Factor {
    Rational(Rational),
    Interval(Interval),
}

/// Enclosure of `log2(prod base_i ^ exponent_i)`.
///
/// Exponents are arbitrary-precision integers, so towers like
/// `(1/2)^(256^256)` are handled as `256^256 * log2(1/2)`.
pub fn log2_of_product(factors: &[(Factor, BigInt)], prec: u32) -> Result<LogMagnitude> {
    let mut acc = Interval::zero(prec);
    for (base, exponent) in factors {
        let l = match base {
            Factor::Rational(r) => {
                if !r.is_positive() {
                    return Err(Error::domain("log2_of_product needs positive bases"));
                }
                log2_rational(r, prec)?
            }
            Factor::Interval(i) => {
                if !i.is_positive() {
                    return Err(Error::domain("log2_of_product needs positive bases"));
                }
                log2_interval(&i.with_precision(prec))?
            }
        };
        acc = acc.add(&l.mul_int(exponent));
    }
    Ok(LogMagnitude::from_log2(&acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::transcendental::pi;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn product_two_pi_times_256_times_half_pow_256() {
        let two_pi = pi(128).shl(1);
        let l = log2_of_product(
            &[
                (Factor::Interval(two_pi), BigInt::from(1)),
                (Factor::Rational(rat(256, 1)), BigInt::from(1)),
                (Factor::Rational(rat(1, 2)), BigInt::from(256)),
            ],
            128,
        )
        .unwrap();
        let lo = l.log2_lo().unwrap().to_f64();
        let hi = l.log2_hi().unwrap().to_f64();
        assert!(lo >= -245.35 && hi <= -245.34, "{lo} {hi}");
    }

    #[test]
    fn product_power_of_two_is_exact() {
        let l = log2_of_product(&[(Factor::Rational(rat(2, 1)), BigInt::from(10))], 64).unwrap();
        assert_eq!(l.log2_lo(), Some(&Dyadic::from_int(10)));
        assert_eq!(l.log2_hi(), Some(&Dyadic::from_int(10)));
    }

    #[test]
    fn product_five_sevenths() {
        let l = log2_of_product(&[(Factor::Rational(rat(5, 7)), BigInt::from(256))], 128).unwrap();
        assert!(l.log2_lo().unwrap().to_f64() >= -124.28);
        assert!(l.log2_hi().unwrap().to_f64() <= -124.26);
    }

    #[test]
    fn product_rejects_non_positive_base() {
        let e = log2_of_product(&[(Factor::Rational(rat(0, 1)), BigInt::from(1))], 64);
        assert!(matches!(e, Err(Error::Domain(_))));
        let e = log2_of_product(&[(Factor::Rational(rat(-3, 1)), BigInt::from(1))], 64);
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn tower_exponent_stays_in_log_domain() {
        // (1/2)^(2^2048) has log2 = -2^2048.
        let q = BigInt::from(1) << 2048usize;
        let l = log2_of_product(&[(Factor::Rational(rat(1, 2)), q)], 64).unwrap();
        assert_eq!(l.log2_hi(), Some(&Dyadic::pow2(2048).neg()));
        assert!(l.to_interval(64).is_err());
    }

    #[test]
    fn sum_bounds() {
        let a = LogMagnitude::from_rational(&rat(3, 1), 64).unwrap();
        let b = LogMagnitude::from_rational(&rat(5, 1), 64).unwrap();
        let s = a.add(&b, 64);
        let eight = LogMagnitude::from_rational(&rat(8, 1), 64).unwrap();
        assert!(s.log2_lo().unwrap() <= eight.log2_lo().unwrap());
        assert!(s.log2_hi().unwrap() >= eight.log2_hi().unwrap());
    }

    #[test]
    fn serde_round_trip() {
        for m in [
            LogMagnitude::zero(),
            LogMagnitude::from_rational(&rat(5, 7), 64).unwrap(),
        ] {
            let a = serde_json::to_string(&m).unwrap();
            let back: LogMagnitude = serde_json::from_str(&a).unwrap();
            assert_eq!(back, m);
            assert_eq!(serde_json::to_string(&back).unwrap(), a);
        }
    }
}
