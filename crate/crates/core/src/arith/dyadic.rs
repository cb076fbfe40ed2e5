//! Exact binary fractions `mantissa * 2^exponent` with directed rounding.
//!
//! These are the endpoints of every [`Interval`](super::Interval). The
//! representation is canonical: the mantissa is odd, or the value is zero
//! with exponent 0. Exponents are `i64`, so magnitudes such as `2^-2048`
//! are ordinary values here.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;
use crate::error::Error;

/// Rounding direction for inexact operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic {
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    pub fn pow2(exp: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Position of the leading bit: `2^msb <= |self| < 2^(msb+1)`.
    pub fn msb(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64 - 1)
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    /// `self + other` rounded to `prec` bits. Unlike [`Dyadic::add`] this
    /// never aligns operands whose magnitudes are astronomically apart.
    pub fn add_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        let (Some(ma), Some(mb)) = (self.msb(), other.msb()) else {
            return self.add(other).round(prec, dir);
        };
        let (big, small, mbig, msmall) = if ma >= mb {
            (self, other, ma, mb)
        } else {
            (other, self, mb, ma)
        };
        if mbig - msmall <= prec as i64 + 8 {
            return self.add(other).round(prec, dir);
        }
        // |small| < 2^t, far below the last kept bit of big.
        let t = mbig - prec as i64 - 4;
        let proxy = match (small.is_positive(), dir) {
            (true, Round::Down) | (false, Round::Up) => Dyadic::zero(),
            (true, Round::Up) => Dyadic::pow2(t),
            (false, Round::Down) => Dyadic::pow2(t).neg(),
        };
        debug_assert!(msmall < t);
        big.add(&proxy).round(prec, dir)
    }

    pub fn sub_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.add_round(&other.neg(), prec, dir)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic::new(&self.mant * k, self.exp)
    }

    /// Multiplication by `2^k`, exact.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let m = shift_round(&self.mant, shift, dir);
        Dyadic::new(m, self.exp + shift as i64)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            let d = BigInt::one() << (-self.exp) as usize;
            self.mant.div_floor(&d)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as usize)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest representable value with `prec` bits on the requested side of `r`.
    pub fn from_rational(r: &Rational, prec: u32, dir: Round) -> Dyadic {
        let num = r.numer();
        let den = r.denom();
        if num.is_zero() {
            return Dyadic::zero();
        }
        if den.is_one() {
            return Dyadic::from_int(num.clone()).round(prec, dir);
        }
        // Scale so that the integer quotient carries prec + 2 bits.
        let s = prec as i64 + 2 - (num.bits() as i64 - den.bits() as i64);
        let (n, d) = if s >= 0 {
            (num << s as usize, den.clone())
        } else {
            (num.clone(), den << (-s) as usize)
        };
        let (q, rem) = n.div_mod_floor(&d);
        let q = if rem.is_zero() || dir == Round::Down {
            q
        } else {
            q + 1
        };
        Dyadic::new(q, -s).round(prec, dir)
    }

    /// `self / other` rounded to `prec` bits.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let (mut a, mut b) = (self.mant.clone(), other.mant.clone());
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        let s = (prec as i64 + 2 - (a.bits() as i64 - b.bits() as i64)).max(0);
        let (q, rem) = (a << s as usize).div_mod_floor(&b);
        let q = if rem.is_zero() || dir == Round::Down {
            q
        } else {
            q + 1
        };
        Dyadic::new(q, self.exp - other.exp - s).round(prec, dir)
    }

    /// Approximate conversion; saturates to 0 or infinity outside f64 range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = (&self.mant >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + shift;
        if e > 2000 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -2200 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(v: f64) -> Option<Dyadic> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Dyadic::new(BigInt::from(m) * sign, e))
    }
}

fn shift_round(m: &BigInt, shift: u64, dir: Round) -> BigInt {
    let d = BigInt::one() << shift as usize;
    match dir {
        Round::Down => m.div_floor(&d),
        Round::Up => -((-m).div_floor(&d)),
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same sign, compare magnitudes by leading bit first.
        let (ma, mb) = (self.msb().unwrap(), other.msb().unwrap());
        let mag = if ma != mb {
            ma.cmp(&mb)
        } else {
            let e = self.exp.min(other.exp);
            let a = self.mant.abs() << (self.exp - e) as usize;
            let b = other.mant.abs() << (other.exp - e) as usize;
            a.cmp(&b)
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
}

fn rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:e})", self, self.to_f64())
    }
}

/// Exact textual form `m*2^e`; plain integers print without the factor.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(format!("invalid dyadic '{s}'"));
        match s.split_once("*2^") {
            Some((m, e)) => {
                let m: BigInt = m.trim().parse().map_err(|_| bad())?;
                let e: i64 = e.trim().parse().map_err(|_| bad())?;
                Ok(Dyadic::new(m, e))
            }
            None => {
                let m: BigInt = s.trim().parse().map_err(|_| bad())?;
                Ok(Dyadic::from_int(m))
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
