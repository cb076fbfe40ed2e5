//! Small divisors `|r^n - lambda| = 2 sin(pi ||n x - y||)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::angle::{AngleValue, LinearForm};
use super::number::RotationNumber;
use crate::arith::transcendental::{log2_interval, sin_pi_with, GUARD_BITS};
use crate::arith::{
    pi, two_sin_pi_exact, Dyadic, Interval, LogMagnitude, Magnitude, PrecisionPolicy,
};
use crate::error::{Error, Result};

/// A point of the unit circle: `e^{2 pi i y}` for an angle `y`, or `r^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CirclePoint {
    Angle(RotationNumber),
    Orbit(u64),
}

impl CirclePoint {
    pub fn one() -> Self {
        CirclePoint::Angle(RotationNumber::rational(crate::arith::int(0)))
    }

    /// `y` as a combination of `x`: `Orbit(k)` means `y = k x`.
    pub fn form(&self, x: &RotationNumber) -> LinearForm {
        match self {
            CirclePoint::Angle(y) => LinearForm::of(y),
            CirclePoint::Orbit(k) => LinearForm::of(x).scale(&BigInt::from(*k)),
        }
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CirclePoint::Angle(y) => write!(f, "angle:{y}"),
            CirclePoint::Orbit(n) => write!(f, "orbit:{n}"),
        }
    }
}

impl FromStr for CirclePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("angle:") {
            return Ok(CirclePoint::Angle(rest.parse()?));
        }
        if let Some(rest) = s.strip_prefix("orbit:") {
            return rest
                .trim()
                .parse()
                .map(CirclePoint::Orbit)
                .map_err(|_| Error::Parse(format!("bad orbit index {rest:?}")));
        }
        Err(Error::Parse(format!("expected angle:<x> or orbit:<n>, got {s:?}")))
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CirclePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallDivisor {
    pub n: u64,
    /// `||n x - y||`.
    pub distance: AngleValue,
    /// `|r^n - lambda|`.
    pub divisor: Magnitude,
    /// `r^n = lambda` exactly.
    pub eigen: bool,
    pub precision_bits: u32,
}

/// Relative width demanded of an interval divisor before refinement stops.
const TARGET_RELATIVE_BITS: u32 = 32;

/// Evaluates `|r^n - lambda|` for a fixed `(x, lambda)` and many `n`.
pub struct DivisorEngine {
    x: LinearForm,
    y: LinearForm,
    policy: PrecisionPolicy,
    pi: Interval,
}

impl DivisorEngine {
    pub fn new(x: &RotationNumber, y: &CirclePoint, policy: PrecisionPolicy) -> Self {
        DivisorEngine {
            x: LinearForm::of(x),
            y: y.form(x),
            policy,
            pi: pi(policy.start + GUARD_BITS),
        }
    }

    /// `n x - y`.
    pub fn form(&self, n: u64) -> LinearForm {
        self.x.scale(&BigInt::from(n)).sub(&self.y)
    }

    pub fn eval(&self, n: u64) -> Result<SmallDivisor> {
        let form = self.form(n);
        if form.has_ball() {
            // extra bits cannot shrink the ball
            return divisor_of(&form, n, self.policy.start, &self.pi);
        }
        self.policy.refine(|prec| {
            let pi = if prec == self.policy.start {
                self.pi.clone()
            } else {
                pi(prec + GUARD_BITS)
            };
            divisor_of(&form, n, prec, &pi)
        })
    }

    /// Lazily evaluated `n = from..=to`.
    pub fn sequence(&self, from: u64, to: u64) -> impl Iterator<Item = Result<SmallDivisor>> + '_ {
        (from..=to).map(move |n| self.eval(n))
    }

    /// `n = from..=to` evaluated in parallel, returned in index order.
    pub fn table(&self, from: u64, to: u64) -> Vec<Result<SmallDivisor>> {
        (from..=to).into_par_iter().map(|n| self.eval(n)).collect()
    }
}

fn divisor_of(form: &LinearForm, n: u64, prec: u32, pi: &Interval) -> Result<SmallDivisor> {
    let distance = form.distance_to_integer(prec)?;
    let divisor = match &distance {
        AngleValue::Exact(t) => match two_sin_pi_exact(t) {
            Some(m) => m,
            None => {
                let s = sin_pi_with(&Interval::from_rational(t, prec), pi)?.shl(1);
                Magnitude::from_interval(s)?
            }
        },
        AngleValue::Enclosed(d) => {
            if !d.is_positive() {
                return Err(Error::precision(format!(
                    "cannot separate {n} x - y from an integer at {prec} bits"
                )));
            }
            let s = sin_pi_with(d, pi)?.shl(1);
            if !form.has_ball() && !s.relative_width_below(TARGET_RELATIVE_BITS) {
                return Err(Error::precision(format!(
                    "divisor at n = {n} not resolved at {prec} bits"
                )));
            }
            Magnitude::from_interval(s)?
        }
        AngleValue::Tiny(t) => Magnitude::Log(tiny_divisor(t, pi, prec)?),
    };
    Ok(SmallDivisor {
        n,
        eigen: divisor.is_zero(),
        distance,
        divisor,
        precision_bits: prec,
    })
}

/// `log2(2 sin(pi t))` for `t < 2^-64`: between `log2(2 pi t) - 2^-120` and
/// `log2(2 pi t)`.
pub fn tiny_divisor(t: &LogMagnitude, pi: &Interval, prec: u32) -> Result<LogMagnitude> {
    let l2pi = log2_interval(&pi.shl(1).with_precision(prec))?;
    let lo = t
        .log2_lo()
        .expect("tiny distances are positive")
        .add_round(l2pi.lo(), prec, crate::arith::Round::Down)
        .sub_round(&Dyadic::pow2(-120), prec, crate::arith::Round::Down);
    let hi = t
        .log2_hi()
        .unwrap()
        .add_round(l2pi.hi(), prec, crate::arith::Round::Up);
    Ok(LogMagnitude::from_log2_bounds(lo, hi))
}

/// `|r^n - lambda|` with `lambda = e^{2 pi i y}`.
pub fn small_divisor(
    x: &RotationNumber,
    n: u64,
    y: &CirclePoint,
    policy: PrecisionPolicy,
) -> Result<SmallDivisor> {
    DivisorEngine::new(x, y, policy).eval(n)
}

/// `(n, |r^n - lambda|)` for `n = 1..=count`, lazily.
pub fn small_divisor_sequence(
    x: &RotationNumber,
    y: &CirclePoint,
    count: u64,
    policy: PrecisionPolicy,
) -> impl Iterator<Item = Result<SmallDivisor>> {
    let engine = DivisorEngine::new(x, y, policy);
    (1..=count).map(move |n| engine.eval(n))
}
