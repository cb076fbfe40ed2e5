//! Outward-rounded interval arithmetic over [`Dyadic`] endpoints.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize};

use super::dyadic::{Dyadic, Round};
use super::Rational;
use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` that is guaranteed to contain the value it
/// stands for. Every operation rounds `lo` down and `hi` up to
/// `precision_bits` significant bits.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo:?} > {hi:?}");
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }

    pub fn point(d: Dyadic, prec: u32) -> Self {
        Interval::new(d.clone(), d, prec)
    }

    pub fn from_int(v: impl Into<BigInt>, prec: u32) -> Self {
        Interval::point(Dyadic::from_int(v), prec)
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(r, prec, Round::Down),
            hi: Dyadic::from_rational(r, prec, Round::Up),
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Interval::point(Dyadic::zero(), prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(&self, prec: u32) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone(), prec)
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> Dyadic {
        self.hi.sub_round(&self.lo, self.prec.max(64), Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        self.lo
            .add_round(&self.hi, 64, Round::Down)
            .shl(-1)
            .to_f64()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        Dyadic::from_f64(v).is_some_and(|d| self.contains(&d))
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Certified `self < other`; `None` when the intervals overlap.
    pub fn certainly_lt(&self, other: &Interval) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Relative width `(hi - lo) / |lo|` compared against `2^-bits`.
    pub fn relative_width_below(&self, bits: u32) -> bool {
        let mag = if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            self.hi.abs()
        } else {
            return false;
        };
        self.width() <= mag.shl(-(bits as i64))
    }

    fn prec_with(&self, other: &Interval) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = self.lo.abs().max(self.hi.clone());
            Interval {
                lo: Dyadic::zero(),
                hi: m,
                prec: self.prec,
            }
        } else if self.hi.is_negative() || self.hi.is_zero() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let p = self.prec_with(other);
        Interval {
            lo: self.lo.add_round(&other.lo, p, Round::Down),
            hi: self.hi.add_round(&other.hi, p, Round::Up),
            prec: p,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let p = self.prec_with(other);
        Interval {
            lo: self.lo.sub_round(&other.hi, p, Round::Down),
            hi: self.hi.sub_round(&other.lo, p, Round::Up),
            prec: p,
        }
    }

    pub fn add_rational(&self, r: &Rational) -> Interval {
        self.add(&Interval::from_rational(r, self.prec))
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let p = self.prec_with(other);
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi, p)
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let (a, b) = (self.lo.mul_int(k), self.hi.mul_int(k));
        if k.is_negative() {
            Interval::new(b, a, self.prec)
        } else {
            Interval::new(a, b, self.prec)
        }
    }

    pub fn mul_rational(&self, r: &Rational) -> Interval {
        self.mul(&Interval::from_rational(r, self.prec))
    }

    /// Multiplication by `2^k`, exact.
    pub fn shl(&self, k: i64) -> Interval {
        Interval {
            lo: self.lo.shl(k),
            hi: self.hi.shl(k),
            prec: self.prec,
        }
    }

    pub fn square(&self) -> Interval {
        let a = self.abs();
        let lo = a.lo.mul(&a.lo);
        let hi = a.hi.mul(&a.hi);
        Interval::new(lo, hi, self.prec)
    }

    pub fn powu(&self, mut n: u64) -> Interval {
        let mut base = self.clone();
        let mut acc = Interval::from_int(1, self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn recip(&self) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::precision("reciprocal of an interval containing zero"));
        }
        let one = Dyadic::one();
        let lo = one.div(&self.hi, self.prec, Round::Down);
        let hi = one.div(&self.lo, self.prec, Round::Up);
        Ok(Interval::new(lo, hi, self.prec))
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        if other.contains_zero() {
            return Err(Error::precision("division by an interval containing zero"));
        }
        let p = self.prec_with(other);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let l = a.div(b, p, Round::Down);
                let h = a.div(b, p, Round::Up);
                lo = Some(lo.map_or(l.clone(), |x| x.min(l)));
                hi = Some(hi.map_or(h.clone(), |x| x.max(h)));
            }
        }
        Ok(Interval::new(lo.unwrap(), hi.unwrap(), p))
    }

    /// Convex hull of two enclosures.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
            self.prec_with(other),
        )
    }

    /// Enclosure of `max(a, b)` for `a` in `self`, `b` in `other`.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().max(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
            self.prec_with(other),
        )
    }

    /// Enclosure of `min(a, b)`.
    pub fn min(&self, other: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().min(other.hi.clone()),
            self.prec_with(other),
        )
    }

    /// Square root of a non-negative interval.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo.is_negative() {
            return Err(Error::domain("square root of a negative interval"));
        }
        let lo = sqrt_dyadic(&self.lo, self.prec, Round::Down);
        let hi = sqrt_dyadic(&self.hi, self.prec, Round::Up);
        Ok(Interval::new(lo, hi, self.prec))
    }

    pub fn sqrt_rational(r: &Rational, prec: u32) -> Result<Interval> {
        if r.is_negative() {
            return Err(Error::domain("square root of a negative rational"));
        }
        // Exact when r is a perfect square of a dyadic; otherwise bracket.
        let num = sqrt_floor_ratio(r.numer(), r.denom(), prec);
        Ok(num)
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

/// `sqrt(d)` to `prec` bits in the requested direction.
fn sqrt_dyadic(d: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    if d.is_zero() {
        return Dyadic::zero();
    }
    // value = m * 2^e; choose s so that e - 2s is even, m * 2^(e+2s') has >= 2 prec bits.
    let m = d.mantissa();
    let e = d.exponent();
    let want = 2 * prec as i64 + 4;
    let mut shift = (want - m.bits() as i64).max(0);
    if (e - shift).rem_euclid(2) != 0 {
        shift += 1;
    }
    let n = m << shift as usize;
    let r = n.sqrt();
    let exact = &r * &r == n;
    let r = if dir == Round::Up && !exact { r + 1 } else { r };
    Dyadic::new(r, (e - shift) / 2).round(prec, dir)
}

fn sqrt_floor_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Interval {
    // sqrt(num/den) = sqrt(num*den)/den
    let prod = num * den;
    let s = Interval::point(Dyadic::from_int(prod), prec + 8)
        .sqrt()
        .expect("non-negative");
    let d = Interval::from_int(den.clone(), prec + 8);
    s.div(&d).expect("denominator positive").with_precision(prec)
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:e}, {:e}]@{}",
            self.lo.to_f64(),
            self.hi.to_f64(),
            self.prec
        )
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
    #[serde(default, skip_deserializing)]
    approx: f64,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            precision_bits: self.prec,
            approx: self.mid_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        if r.lo > r.hi {
            return Err(serde::de::Error::custom("interval lo > hi"));
        }
        Ok(Interval {
            lo: r.lo,
            hi: r.hi,
            prec: r.precision_bits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rational_enclosure_contains_value() {
        let i = Interval::from_rational(&rat(2, 7), 64);
        assert!(i.contains_rational(&rat(2, 7)));
        assert!(i.width() <= Dyadic::pow2(-64));
    }

    #[test]
    fn multiplication_handles_signs() {
        let a = Interval::new(Dyadic::from_int(-2), Dyadic::from_int(3), 64);
        let b = Interval::new(Dyadic::from_int(-5), Dyadic::from_int(1), 64);
        let c = a.mul(&b);
        assert_eq!(c.lo(), &Dyadic::from_int(-15));
        assert_eq!(c.hi(), &Dyadic::from_int(10));
    }

    #[test]
    fn sqrt_of_two_brackets() {
        let s = Interval::from_int(2, 128).sqrt().unwrap();
        let sq = s.square();
        assert!(sq.contains(&Dyadic::from_int(2)));
        assert!(s.relative_width_below(120));
        let four = Interval::from_int(4, 64).sqrt().unwrap();
        assert!(four.is_point() && four.lo() == &Dyadic::from_int(2));
    }

    #[test]
    fn sqrt_rational_contains_value() {
        let s = Interval::sqrt_rational(&rat(3, 5), 96).unwrap();
        assert!(s.square().contains_rational(&rat(3, 5)));
    }

    #[test]
    fn division_rejects_zero() {
        let a = Interval::from_int(1, 64);
        let z = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1), 64);
        assert!(a.div(&z).is_err());
        let third = a.div(&Interval::from_int(3, 64)).unwrap();
        assert!(third.contains_rational(&rat(1, 3)));
    }

    #[test]
    fn power_encloses_exact_value() {
        let base = Interval::from_rational(&rat(2, 3), 128);
        let p = base.powu(100);
        let exact = num_traits::pow::pow(rat(2, 3), 100);
        assert!(p.contains_rational(&exact));
    }

    #[test]
    fn serde_round_trip_is_byte_stable() {
        let i = Interval::from_rational(&rat(1, 3), 64);
        let a = serde_json::to_string(&i).unwrap();
        let back: Interval = serde_json::from_str(&a).unwrap();
        assert_eq!(back, i);
        assert_eq!(serde_json::to_string(&back).unwrap(), a);
    }
}
