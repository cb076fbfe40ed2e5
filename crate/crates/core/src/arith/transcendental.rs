//! Certified enclosures of the few transcendental functions the crate needs:
//! `pi`, `sin(pi t)`, `log2` and `2^v`.
//!
//! Every series is summed in interval arithmetic and closed with an explicit
//! remainder bound, so the returned interval always contains the true value.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::dyadic::{Dyadic, Round};
use super::interval::Interval;
use super::Rational;
use crate::error::{Error, Result};

pub const GUARD_BITS: u32 = 24;

fn atan_inv(k: u64, w: u32) -> Interval {
    // atan(1/k) = sum (-1)^i / ((2i+1) k^(2i+1)), alternating and decreasing.
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut pow = k.clone();
    let mut sum = Interval::zero(w);
    let cutoff = Dyadic::pow2(-(w as i64) - 4);
    let mut i: u64 = 0;
    loop {
        let den = &pow * BigInt::from(2 * i + 1);
        let term = Interval::from_rational(&Rational::new(BigInt::one(), den), w);
        if term.hi() < &cutoff {
            let tail = Interval::new(term.hi().neg(), term.hi().clone(), w);
            return sum.add(&tail);
        }
        sum = if i % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        pow *= &k2;
        i += 1;
    }
}

/// Enclosure of `pi` at `prec` bits.
pub fn pi(prec: u32) -> Interval {
    let w = prec + GUARD_BITS;
    let a = atan_inv(5, w).mul_int(&BigInt::from(16));
    let b = atan_inv(239, w).mul_int(&BigInt::from(4));
    a.sub(&b).with_precision(prec)
}

/// Taylor enclosure of `sin` over an interval `theta` inside `(0, pi/2]`.
fn sin_taylor(theta: &Interval, w: u32) -> Interval {
    let theta2 = theta.square();
    let mut term = theta.clone();
    let mut sum = theta.clone();
    let cutoff = theta.lo().shl(-(w as i64) - 4);
    let mut k: u64 = 1;
    loop {
        let den = BigInt::from((2 * k) * (2 * k + 1));
        term = term
            .mul(&theta2)
            .div(&Interval::from_int(den, w))
            .expect("positive denominator");
        sum = if k % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
        if term.hi() < &cutoff {
            // Terms decrease (theta^2 < 6), so the remainder is below the last term.
            let r = Interval::new(term.hi().neg(), term.hi().clone(), w);
            return sum.add(&r);
        }
        k += 1;
    }
}

/// Enclosure of `sin(pi * t)` for `t` inside `[0, 1/2]`.
///
/// The function is monotone there, so endpoints are evaluated separately.
pub fn sin_pi(t: &Interval) -> Result<Interval> {
    sin_pi_with(t, &pi(t.precision_bits() + GUARD_BITS))
}

/// [`sin_pi`] with a caller-supplied enclosure of `pi`, which should carry at
/// least `GUARD_BITS` more precision than `t`.
pub fn sin_pi_with(t: &Interval, pi: &Interval) -> Result<Interval> {
    let half = Dyadic::pow2(-1);
    if t.lo().is_negative() || t.hi() > &half {
        return Err(Error::domain(
            "sin_pi expects an argument inside [0, 1/2]; reduce with nearest_int_distance first",
        ));
    }
    let prec = t.precision_bits();
    let w = prec + GUARD_BITS;
    let at = |d: &Dyadic| -> Interval {
        if d.is_zero() {
            Interval::zero(w)
        } else if d == &half {
            Interval::from_int(1, w)
        } else {
            sin_taylor(&pi.mul(&Interval::point(d.clone(), w)), w)
        }
    };
    let (lo, hi) = if t.is_point() {
        let v = at(t.lo());
        (v.lo().clone(), v.hi().clone())
    } else if t.lo().is_zero() || t.hi() == &half {
        (at(t.lo()).lo().clone(), at(t.hi()).hi().clone())
    } else {
        // One evaluation at the midpoint; sin(pi t) is pi-Lipschitz.
        let mid = t.lo().add(t.hi()).shl(-1);
        let v = at(&mid);
        let r = pi.hi().mul(&t.hi().sub(&mid)).round(w, Round::Up);
        (v.lo().sub(&r), v.hi().add(&r))
    };
    let lo = lo.max(Dyadic::zero());
    let hi = hi.min(Dyadic::one());
    Ok(Interval::new(lo, hi, prec))
}

/// `atanh(s)` for `s` inside `[0, 1/3]`.
fn atanh_small(s: &Interval, w: u32) -> Interval {
    if s.is_zero() {
        return Interval::zero(w);
    }
    let s2 = s.square();
    let mut pow = s.clone();
    let mut sum = s.clone();
    let cutoff = s.lo().shl(-(w as i64) - 4);
    let mut i: u64 = 1;
    loop {
        pow = pow.mul(&s2);
        let term = pow
            .div(&Interval::from_int(2 * i + 1, w))
            .expect("positive denominator");
        sum = sum.add(&term);
        if term.hi() < &cutoff {
            // Remaining terms shrink by s^2 <= 1/9 each: tail <= term / 8.
            let r = Interval::new(Dyadic::zero(), term.hi().shl(-3), w);
            return sum.add(&r);
        }
        i += 1;
    }
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Interval {
    let w = prec + GUARD_BITS;
    let third = Interval::from_rational(&Rational::new(1.into(), 3.into()), w);
    atanh_small(&third, w).shl(1).with_precision(prec)
}

/// Enclosure of `log2(d)` for a positive dyadic.
pub fn log2_dyadic(d: &Dyadic, prec: u32) -> Result<Interval> {
    if !d.is_positive() {
        return Err(Error::domain("logarithm of a non-positive number"));
    }
    let k = d.msb().expect("nonzero");
    let y = d.shl(-k); // in [1, 2)
    if y == Dyadic::one() {
        return Ok(Interval::from_int(k, prec));
    }
    let w = prec + GUARD_BITS + (64 - (k.unsigned_abs() | 1).leading_zeros());
    let num = Interval::point(y.sub(&Dyadic::one()), w);
    let den = Interval::point(y.add(&Dyadic::one()), w);
    let s = num.div(&den)?;
    let ln_y = atanh_small(&s, w).shl(1);
    let frac = ln_y.div(&ln2(w))?;
    Ok(frac.add(&Interval::from_int(k, w)).with_precision(prec))
}

/// Enclosure of `log2` over a positive interval.
pub fn log2_interval(i: &Interval) -> Result<Interval> {
    if !i.is_positive() {
        return Err(Error::domain("logarithm of an interval that is not positive"));
    }
    let prec = i.precision_bits();
    let lo = log2_dyadic(i.lo(), prec)?;
    if i.is_point() {
        return Ok(lo);
    }
    let hi = log2_dyadic(i.hi(), prec)?;
    Ok(Interval::new(lo.lo().clone(), hi.hi().clone(), prec))
}

pub fn log2_rational(r: &Rational, prec: u32) -> Result<Interval> {
    if !r.is_positive() {
        return Err(Error::domain("logarithm of a non-positive rational"));
    }
    if r.denom().is_one() {
        return log2_dyadic(&Dyadic::from_int(r.numer().clone()), prec);
    }
    let i = Interval::from_rational(r, prec + GUARD_BITS);
    Ok(log2_interval(&i)?.with_precision(prec))
}

pub fn log2_bigint(q: &BigInt, prec: u32) -> Result<Interval> {
    log2_dyadic(&Dyadic::from_int(q.clone()), prec)
}

fn exp2_point(d: &Dyadic, w: u32) -> Result<Interval> {
    if d.msb().is_some_and(|m| m > 61) {
        return Err(Error::BeyondRange(format!("2^({d}) has an exponent outside i64")));
    }
    let k = d.floor();
    let k = k
        .to_i64()
        .filter(|k| k.unsigned_abs() < (1u64 << 62))
        .ok_or_else(|| Error::BeyondRange(format!("2^{d} has an exponent outside i64")))?;
    let f = d.sub(&Dyadic::from_int(k)); // [0, 1)
    if f.is_zero() {
        return Ok(Interval::point(Dyadic::pow2(k), w));
    }
    let u = ln2(w).mul(&Interval::point(f, w)); // < 0.7
    let mut term = Interval::from_int(1, w);
    let mut sum = term.clone();
    let cutoff = Dyadic::pow2(-(w as i64) - 4);
    let mut i: u64 = 1;
    loop {
        term = term.mul(&u).div(&Interval::from_int(i, w))?;
        sum = sum.add(&term);
        if term.hi() < &cutoff {
            // Ratio of consecutive terms is below 1/2 from here on.
            let r = Interval::new(Dyadic::zero(), term.hi().shl(1), w);
            return Ok(sum.add(&r).shl(k));
        }
        i += 1;
    }
}

/// Enclosure of `2^v`.
pub fn exp2(v: &Interval) -> Result<Interval> {
    let prec = v.precision_bits();
    let w = prec + GUARD_BITS;
    let lo = exp2_point(v.lo(), w)?;
    let hi = if v.is_point() {
        lo.clone()
    } else {
        exp2_point(v.hi(), w)?
    };
    Ok(Interval::new(lo.lo().clone(), hi.hi().clone(), prec))
}

/// Directed `log2` of a dyadic as a single bound.
pub fn log2_bound(d: &Dyadic, prec: u32, dir: Round) -> Result<Dyadic> {
    let i = log2_dyadic(d, prec)?;
    Ok(match dir {
        Round::Down => i.lo().clone(),
        Round::Up => i.hi().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn pi_matches_known_digits() {
        let p = pi(128);
        let scale = BigInt::from(10).pow(35);
        let digits: BigInt = "314159265358979323846264338327950288".parse().unwrap();
        let below = Rational::new(digits.clone() - 1, scale.clone());
        let above = Rational::new(digits + 1, scale);
        assert!(p.lo().to_rational() > below);
        assert!(p.hi().to_rational() < above);
        assert!(p.relative_width_below(120));
    }

    #[test]
    fn sin_pi_exact_points() {
        let s = sin_pi(&Interval::from_rational(&rat(1, 6), 64)).unwrap();
        assert!(s.contains_f64(0.5));
        assert!(s.relative_width_below(56));
        let z = sin_pi(&Interval::zero(64)).unwrap();
        assert!(z.is_zero());
        let third = sin_pi(&Interval::from_rational(&rat(1, 3), 64)).unwrap();
        assert!(third.square().contains_rational(&rat(3, 4)));
        assert!((third.mid_f64() - 0.866_025_403_784_438_6).abs() < 1e-15);
    }

    #[test]
    fn sin_pi_rejects_unreduced_argument() {
        assert!(sin_pi(&Interval::from_rational(&rat(3, 4), 64)).is_err());
    }

    #[test]
    fn sin_pi_keeps_relative_accuracy_for_tiny_arguments() {
        let t = Interval::point(Dyadic::pow2(-2040), 128);
        let s = sin_pi(&t).unwrap();
        assert!(s.is_positive());
        assert!(s.relative_width_below(100));
        let l = log2_interval(&s).unwrap();
        // log2(pi) - 2040
        assert!((l.mid_f64() - (std::f64::consts::PI.log2() - 2040.0)).abs() < 1e-9);
    }

    #[test]
    fn log2_values() {
        let l = log2_rational(&rat(5, 7), 128).unwrap().mul_int(&BigInt::from(256));
        assert!((l.mid_f64() + 124.269_267_755_581_9).abs() < 1e-9);
        let e = log2_bigint(&BigInt::from(1024), 64).unwrap();
        assert!(e.is_point() && e.lo() == &Dyadic::from_int(10));
        assert!(log2_rational(&rat(0, 1), 64).is_err());
    }

    #[test]
    fn exp2_inverts_log2() {
        let v = Interval::from_rational(&rat(-245, 256), 128);
        let e = exp2(&v).unwrap();
        assert!((e.mid_f64() - 2f64.powf(-245.0 / 256.0)).abs() < 1e-15);
        let back = log2_interval(&e).unwrap();
        assert!(back.overlaps(&v));
    }
}
