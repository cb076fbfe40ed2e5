//! Exact bookkeeping for integer combinations of rotation numbers.
//!
//! `n x - y` is kept as a rational part, exact coefficients of square roots,
//! integer multiples of Liouville tails, and a ball radius. Only the parts
//! that cannot be exact are enclosed, so cancellation is detected exactly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::number::{LiouvilleNumber, RotationNumber};
use crate::arith::transcendental::log2_bigint;
use crate::arith::{as_string, Dyadic, Interval, LogMagnitude, Rational, Round};
use crate::error::{Error, Result};

/// A non-negative real angle quantity in one of three tiers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tier", content = "value", rename_all = "snake_case")]
pub enum AngleValue {
    #[serde(with = "as_string")]
    Exact(Rational),
    Enclosed(Interval),
    /// Too small for a binary exponent; only `log2` is known.
    Tiny(LogMagnitude),
}

impl AngleValue {
    pub fn is_zero(&self) -> bool {
        matches!(self, AngleValue::Exact(r) if r.is_zero())
    }

    /// Certainly strictly positive.
    pub fn is_positive(&self) -> bool {
        match self {
            AngleValue::Exact(r) => r.is_positive(),
            AngleValue::Enclosed(i) => i.is_positive(),
            AngleValue::Tiny(l) => !l.is_zero(),
        }
    }

    pub fn to_log(&self, prec: u32) -> Result<LogMagnitude> {
        match self {
            AngleValue::Exact(r) => LogMagnitude::from_rational(r, prec),
            AngleValue::Enclosed(i) if i.is_positive() => LogMagnitude::from_interval(i),
            AngleValue::Enclosed(_) => Err(Error::precision("enclosure touches zero")),
            AngleValue::Tiny(l) => Ok(l.clone()),
        }
    }

    pub fn approx_f64(&self) -> f64 {
        match self {
            AngleValue::Exact(r) => Interval::from_rational(r, 64).mid_f64(),
            AngleValue::Enclosed(i) => i.mid_f64(),
            AngleValue::Tiny(l) => l.approx_log2().exp2(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinearForm {
    rational: Rational,
    surds: BTreeMap<BigInt, Rational>,
    tails: Vec<(BigInt, Arc<LiouvilleNumber>)>,
    radius: Rational,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm {
            rational: Rational::zero(),
            surds: BTreeMap::new(),
            tails: Vec::new(),
            radius: Rational::zero(),
        }
    }

    pub fn constant(r: Rational) -> Self {
        LinearForm {
            rational: r,
            ..LinearForm::zero()
        }
    }

    pub fn of(x: &RotationNumber) -> Self {
        let mut f = LinearForm::zero();
        match x {
            RotationNumber::Rational(r) => f.rational = r.clone(),
            RotationNumber::Surd(s) => {
                let (r0, r1) = s.parts();
                f.rational = r0;
                f.surds.insert(s.d().clone(), r1);
            }
            RotationNumber::Liouville(l) => {
                f.rational = l.head().clone();
                f.tails.push((BigInt::one(), l.clone()));
            }
            RotationNumber::Ball(b) => {
                f.rational = b.center.clone();
                f.radius = b.radius.clone();
            }
        }
        f
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return LinearForm::zero();
        }
        let kr = Rational::from_integer(k.clone());
        LinearForm {
            rational: &self.rational * &kr,
            surds: self.surds.iter().map(|(d, c)| (d.clone(), c * &kr)).collect(),
            tails: self.tails.iter().map(|(c, l)| (c * k, l.clone())).collect(),
            radius: &self.radius * kr.abs(),
        }
    }

    pub fn add(&self, other: &LinearForm) -> Self {
        let mut out = self.clone();
        out.rational += &other.rational;
        for (d, c) in &other.surds {
            let e = out.surds.entry(d.clone()).or_insert_with(Rational::zero);
            *e += c;
        }
        out.surds.retain(|_, c| !c.is_zero());
        for (c, l) in &other.tails {
            match out.tails.iter_mut().find(|(_, m)| m == l) {
                Some((k, _)) => *k += c,
                None => out.tails.push((c.clone(), l.clone())),
            }
        }
        out.tails.retain(|(c, _)| !c.is_zero());
        out.radius += &other.radius;
        out
    }

    pub fn sub(&self, other: &LinearForm) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        let mut out = self.clone();
        out.rational += r;
        out
    }

    /// The exact value, when nothing irrational or uncertain survived.
    pub fn as_exact(&self) -> Option<&Rational> {
        (self.surds.is_empty() && self.tails.is_empty() && self.radius.is_zero())
            .then_some(&self.rational)
    }

    pub fn has_ball(&self) -> bool {
        !self.radius.is_zero()
    }

    /// Irrational by construction: a surviving root or Liouville tail and no ball.
    pub fn certainly_irrational(&self) -> bool {
        !self.has_ball() && self.surds.len() + self.tails.len() == 1
    }

    fn irrational_enclosure(&self, prec: u32) -> Interval {
        let w = prec + 16;
        let mut acc = Interval::zero(w);
        for (d, c) in &self.surds {
            let root = Interval::sqrt_rational(&Rational::from_integer(d.clone()), w + c.numer().bits() as u32)
                .expect("positive radicand");
            acc = acc.add(&root.mul_rational(c));
        }
        for (c, l) in &self.tails {
            acc = acc.add(&l.tail_enclosure(w).mul_int(c));
        }
        if self.has_ball() {
            let r = Dyadic::from_rational(&self.radius, w, Round::Up);
            acc = acc.add(&Interval::new(r.neg(), r, w));
        }
        acc
    }

    /// Single-tail log form `log2 |c * tail|`, when it is certainly below `2^-64`.
    fn tiny_tail(&self, prec: u32) -> Result<Option<LogMagnitude>> {
        if !self.surds.is_empty() || self.has_ball() || self.tails.len() != 1 {
            return Ok(None);
        }
        let (c, l) = &self.tails[0];
        let (lo, hi) = l.tail_log2_bounds(l.depth());
        let lc = log2_bigint(&c.abs(), prec)?;
        let lo = lo.add(&lc);
        let hi = hi.add(&lc);
        if hi.hi() >= &Dyadic::from_int(-64) {
            return Ok(None);
        }
        Ok(Some(LogMagnitude::from_log2_bounds(
            lo.lo().clone(),
            hi.hi().clone(),
        )))
    }

    /// `|value|`, with no reduction modulo 1.
    pub fn abs_value(&self, prec: u32) -> Result<AngleValue> {
        if let Some(r) = self.as_exact() {
            return Ok(AngleValue::Exact(r.abs()));
        }
        if self.rational.is_zero() {
            if let Some(t) = self.tiny_tail(prec)? {
                return Ok(AngleValue::Tiny(t));
            }
        }
        let t = self.irrational_enclosure(prec).add_rational(&self.rational);
        Ok(AngleValue::Enclosed(t.abs().with_precision(prec)))
    }

    /// Sign of the value, when it can be certified at `prec`.
    pub fn sign(&self, prec: u32) -> Option<Ordering> {
        if let Some(r) = self.as_exact() {
            return Some(r.cmp(&Rational::zero()));
        }
        // Liouville tails are positive, so a one-signed form needs no enclosure.
        if self.surds.is_empty() && !self.has_ball() {
            let r = self.rational.cmp(&Rational::zero());
            if self.tails.iter().all(|(c, _)| c.is_positive()) && r != Ordering::Less {
                return Some(Ordering::Greater);
            }
            if self.tails.iter().all(|(c, _)| c.is_negative()) && r != Ordering::Greater {
                return Some(Ordering::Less);
            }
        }
        let e = self.enclose(prec);
        if e.is_positive() {
            Some(Ordering::Greater)
        } else if e.neg().is_positive() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Signed enclosure of the value itself.
    pub fn enclose(&self, prec: u32) -> Interval {
        self.irrational_enclosure(prec)
            .add_rational(&self.rational)
            .with_precision(prec)
    }

    /// Distance to the nearest integer, `||value||`.
    pub fn distance_to_integer(&self, prec: u32) -> Result<AngleValue> {
        let k = self.rational.round();
        let r = &self.rational - &k;
        if self.as_exact().is_some() {
            return Ok(AngleValue::Exact(crate::arith::nearest_int_distance(&r)));
        }
        if r.is_zero() {
            if let Some(t) = self.tiny_tail(prec)? {
                return Ok(AngleValue::Tiny(t));
            }
        }
        let t = self.irrational_enclosure(prec).add_rational(&r);
        Ok(AngleValue::Enclosed(reduce_to_distance(&t, prec)?))
    }

    /// The reduced signed value in `[-1/2, 1/2]` plus the integer removed.
    pub fn reduce(&self, prec: u32) -> Result<(Interval, BigInt)> {
        let k = self.rational.round();
        let r = &self.rational - &k;
        let t = self.irrational_enclosure(prec).add_rational(&r);
        let m = Dyadic::from_f64(t.mid_f64().round())
            .ok_or_else(|| Error::precision("angle enclosure not finite"))?
            .floor();
        let shifted = t.add_rational(&Rational::from_integer(-m.clone()));
        Ok((shifted.with_precision(prec), k.to_integer() + m))
    }
}

/// `min(|t|, 1 - |t|)` for an enclosure `t` already near `[-1/2, 1/2]`.
fn reduce_to_distance(t: &Interval, prec: u32) -> Result<Interval> {
    let m = t.mid_f64().round();
    let m = Dyadic::from_f64(m).ok_or_else(|| Error::precision("angle enclosure not finite"))?;
    let t = t.sub(&Interval::point(m, t.precision_bits()));
    let one = Dyadic::one();
    if t.width() >= Dyadic::pow2(-1) || t.hi() >= &one || t.lo() <= &one.neg() {
        return Err(Error::precision("angle enclosure too wide to reduce modulo 1"));
    }
    let a = t.abs();
    let b = Interval::from_int(1, a.precision_bits()).sub(&a);
    let d = a.min(&b);
    let lo = d.lo().clone().max(Dyadic::zero());
    let hi = d.hi().clone().min(Dyadic::pow2(-1));
    Ok(Interval::new(lo, hi, prec))
}

/// Exact residue `||v||` of a rational; convenience for callers outside.
pub fn rational_distance(v: &Rational) -> Rational {
    crate::arith::nearest_int_distance(v)
}

/// Solve `n x = y (mod 1)` for `n` in `[lo, lo + period)` when both are rational.
pub fn rational_orbit_index(x: &Rational, y: &Rational, lo: u64) -> Option<BigInt> {
    let q = x.denom().clone();
    let p = x.numer().mod_floor(&q);
    let yf = crate::arith::frac(y);
    if !(&q % yf.denom()).is_zero() {
        return None;
    }
    let target = yf.numer() * (&q / yf.denom());
    if q.is_one() {
        return target.is_zero().then(|| BigInt::from(lo));
    }
    let inv = mod_inverse(&p, &q)?;
    let n0 = (target * inv).mod_floor(&q);
    // shift into [lo, lo + q)
    let lo = BigInt::from(lo);
    let k: BigInt = (&lo - &n0 + &q - BigInt::one()).div_floor(&q);
    Some(n0 + k * q)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}
