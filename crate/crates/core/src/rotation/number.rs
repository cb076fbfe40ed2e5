//! Representations of the rotation angle `x` (in turns).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::transcendental::log2_bigint;
use crate::arith::{frac, int, Dyadic, Interval, Rational, DEFAULT_PRECISION};
use crate::error::{Error, Result};

/// Largest exact integer, in bits, materialised for a Liouville construction.
pub const DEFAULT_BIT_BUDGET: u64 = 65_536;

/// `(a + b sqrt(d)) / c` reduced into `(0, 1)`, with `d > 1` square-free up to
/// trial division, `c > 0` and `gcd(a, b, c) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl QuadraticSurd {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::domain("surd denominator is zero"));
        }
        if !d.is_positive() {
            return Err(Error::domain("surd radicand must be positive"));
        }
        if b.is_zero() {
            return Err(Error::domain("surd coefficient of the root is zero"));
        }
        let (mut a, mut b, mut c) = if c.is_negative() { (-a, -b, -c) } else { (a, b, c) };
        let (outside, d) = pull_squares(&d);
        if d.is_one() {
            return Err(Error::domain("surd radicand is a perfect square"));
        }
        b *= outside;
        let g = a.gcd(&b).gcd(&c);
        a /= &g;
        b /= &g;
        c /= &g;
        let mut s = QuadraticSurd { a, b, c, d };
        let k = s.floor();
        s.a -= k * &s.c;
        Ok(s)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    /// Rational part and coefficient of `sqrt(d)`.
    pub fn parts(&self) -> (Rational, Rational) {
        (
            Rational::new(self.a.clone(), self.c.clone()),
            Rational::new(self.b.clone(), self.c.clone()),
        )
    }

    /// Exact floor, using `floor(b sqrt d)` from an integer square root.
    fn floor(&self) -> BigInt {
        let s = (&self.b * &self.b * &self.d).sqrt();
        // b sqrt d lies strictly between consecutive integers.
        let below = if self.b.is_positive() { s } else { -s - 1 };
        (&self.a + below).div_floor(&self.c)
    }

    pub fn enclose(&self, prec: u32) -> Interval {
        let (r0, r1) = self.parts();
        let w = prec + 16;
        let root = Interval::sqrt_rational(&Rational::from_integer(self.d.clone()), w)
            .expect("positive radicand");
        root.mul_rational(&r1).add_rational(&r0).with_precision(prec)
    }

    /// Periodic continued fraction.
    pub fn expansion(&self) -> SurdExpansion {
        SurdExpansion::of(self)
    }
}

/// Split `d = outside^2 * rest`, trial-dividing small primes.
fn pull_squares(d: &BigInt) -> (BigInt, BigInt) {
    let mut rest = d.clone();
    let mut outside = BigInt::one();
    let mut f = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &f * &f <= rest && f <= limit {
        let f2 = &f * &f;
        while (&rest % &f2).is_zero() {
            rest /= &f2;
            outside *= &f;
        }
        f += 1;
    }
    (outside, rest)
}

/// Continued fraction of a quadratic surd: pre-period, period, and the
/// `(P, Q)` states of the complete quotients `(P + sqrt(D)) / Q`.
#[derive(Debug, Clone)]
pub struct SurdExpansion {
    pub pre: Vec<BigInt>,
    pub period: Vec<BigInt>,
    radicand: BigInt,
    states: Vec<(BigInt, BigInt)>,
}

impl SurdExpansion {
    fn of(s: &QuadraticSurd) -> SurdExpansion {
        let d_full = &s.b * &s.b * &s.d;
        let (mut p, mut q) = if s.b.is_positive() {
            (s.a.clone(), s.c.clone())
        } else {
            (-s.a.clone(), -s.c.clone())
        };
        let mut dd = d_full;
        if !((&dd - &p * &p) % &q).is_zero() {
            let qa = q.abs();
            p *= &qa;
            dd *= &q * &q;
            q *= &qa;
        }
        let root = dd.sqrt();
        let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
        let mut quotients = Vec::new();
        let mut states = Vec::new();
        loop {
            if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
                let period = quotients.split_off(start);
                return SurdExpansion {
                    pre: quotients,
                    period,
                    radicand: dd,
                    states,
                };
            }
            seen.insert((p.clone(), q.clone()), quotients.len());
            states.push((p.clone(), q.clone()));
            let num = if q.is_positive() { &p + &root } else { &p + &root + 1 };
            let a = num.div_floor(&q);
            let p_next = &a * &q - &p;
            let q_next = (&dd - &p_next * &p_next) / &q;
            quotients.push(a);
            p = p_next;
            q = q_next;
        }
    }

    pub fn quotient(&self, i: usize) -> &BigInt {
        if i < self.pre.len() {
            &self.pre[i]
        } else {
            &self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    fn state(&self, i: usize) -> &(BigInt, BigInt) {
        if i < self.pre.len() {
            &self.states[i]
        } else {
            &self.states[self.pre.len() + (i - self.pre.len()) % self.period.len()]
        }
    }

    /// Enclosure of the complete quotient `alpha_i`, so that
    /// `x = [a_0; ..., a_{i-1}, alpha_i]`.
    pub fn complete_quotient(&self, i: usize, prec: u32) -> Interval {
        let (p, q) = self.state(i);
        let root = Interval::sqrt_rational(&Rational::from_integer(self.radicand.clone()), prec + 8)
            .expect("positive radicand");
        root.add_rational(&Rational::from_integer(p.clone()))
            .div(&Interval::from_int(q.clone(), prec + 8))
            .expect("nonzero Q")
            .with_precision(prec)
    }

    /// Upper bound of `sup_{i >= from} alpha_i`.
    pub fn complete_quotient_sup(&self, from: usize, prec: u32) -> Dyadic {
        let end = self.pre.len() + self.period.len();
        (from.min(self.pre.len())..end)
            .map(|i| self.complete_quotient(i, prec).hi().clone())
            .max()
            .expect("period is non-empty")
    }
}

/// `x(m) = sum_j 1/q_j` with `q_1 = m`, `q_{j+1} = q_j^{q_j}`, materialised to
/// depth `J`: the exact `q_1..q_J`, the exact partial sums, and `log2 q_{J+1}`.
#[derive(Debug, Clone)]
pub struct LiouvilleNumber {
    m: u64,
    q: Vec<BigInt>,
    sums: Vec<Rational>,
    next_q: Option<BigInt>,
    log2_q: Vec<Interval>,
    requested_depth: usize,
}

impl PartialEq for LiouvilleNumber {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.q.len() == other.q.len()
    }
}

impl Eq for LiouvilleNumber {}

/// Why a construction stopped short of the requested depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub requested_depth: usize,
    pub depth: usize,
    pub bit_budget: u64,
    /// Enclosure of `log2 q_{J+1}` for the first value that did not fit.
    pub next_q_log2: Interval,
}

impl LiouvilleNumber {
    pub fn new(m: u64, depth: Option<usize>) -> Result<Self> {
        LiouvilleNumber::with_budget(m, depth, DEFAULT_BIT_BUDGET)
    }

    pub fn with_budget(m: u64, depth: Option<usize>, bit_budget: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain("Liouville construction needs m >= 2"));
        }
        if depth == Some(0) {
            return Err(Error::domain("Liouville depth must be at least 1"));
        }
        let want = depth.unwrap_or(usize::MAX);
        let prec = DEFAULT_PRECISION;
        let mut q = vec![BigInt::from(m)];
        let mut log2_q = vec![log2_bigint(&q[0], prec)?];
        let next_q;
        loop {
            let last = q.last().unwrap();
            let l = log2_q.last().unwrap();
            let next_log = l.mul_int(last);
            let fits = next_log.hi() <= &Dyadic::from_int(bit_budget);
            let next = fits.then(|| {
                let e = last.to_u32().expect("exponent fits when within budget");
                last.pow(e)
            });
            log2_q.push(next_log);
            if q.len() >= want || next.is_none() {
                next_q = next;
                break;
            }
            q.push(next.unwrap());
        }
        let mut sums = Vec::with_capacity(q.len());
        let mut acc = Rational::zero();
        for qj in &q {
            acc += Rational::new(BigInt::one(), qj.clone());
            sums.push(acc.clone());
        }
        Ok(LiouvilleNumber {
            m,
            requested_depth: depth.unwrap_or(q.len()),
            q,
            sums,
            next_q,
            log2_q,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.q.len()
    }

    /// `q_1..q_J`.
    pub fn q(&self) -> &[BigInt] {
        &self.q
    }

    /// Exact partial sums `p_j / q_j` for `j = 1..J`.
    pub fn partial_sums(&self) -> &[Rational] {
        &self.sums
    }

    pub fn next_q(&self) -> Option<&BigInt> {
        self.next_q.as_ref()
    }

    /// Enclosures of `log2 q_j` for `j = 1..J+1`.
    pub fn log2_q(&self) -> &[Interval] {
        &self.log2_q
    }

    pub fn truncation(&self, bit_budget: u64) -> Option<Truncation> {
        (self.requested_depth > self.depth()).then(|| Truncation {
            requested_depth: self.requested_depth,
            depth: self.depth(),
            bit_budget,
            next_q_log2: self.log2_q[self.depth()].clone(),
        })
    }

    /// Exact sum through depth `J`.
    pub fn head(&self) -> &Rational {
        self.sums.last().unwrap()
    }

    /// The tail `x - p_j/q_j` lies in `(1/q_{j+1}, 2/q_{j+1}]`; returns
    /// enclosures of `log2` of the lower and upper bound.
    pub fn tail_log2_bounds(&self, j: usize) -> (Interval, Interval) {
        assert!((1..=self.depth()).contains(&j));
        let l = &self.log2_q[j];
        let lower = l.neg();
        let upper = Interval::from_int(1, l.precision_bits()).sub(l);
        (lower, upper)
    }

    pub fn enclose(&self, prec: u32) -> Interval {
        let head = Interval::from_rational(self.head(), prec);
        head.add(&self.tail_enclosure(prec))
    }

    /// Enclosure of the tail after depth `J`, in linear scale. When `q_{J+1}`
    /// is not materialised the bound `2^-(floor log2 q_{J+1}) * 2` is used,
    /// capped at `2^-(2^61)` for exponents outside `i64`.
    pub fn tail_enclosure(&self, prec: u32) -> Interval {
        if let Some(nq) = &self.next_q {
            let lo = Dyadic::from_rational(&Rational::new(BigInt::one(), nq.clone()), prec, crate::arith::Round::Down);
            let hi = Dyadic::from_rational(&Rational::new(BigInt::from(2), nq.clone()), prec, crate::arith::Round::Up);
            return Interval::new(lo, hi, prec);
        }
        let l = &self.log2_q[self.depth()];
        let cap = 1i64 << 61;
        let fl = l.lo().floor();
        let k = fl.to_i64().filter(|&k| k < cap).unwrap_or(cap);
        Interval::new(Dyadic::zero(), Dyadic::pow2(1 - k), prec)
    }

    /// Rational endpoints `lo < x < hi` usable for certifying quotients.
    pub fn rational_bracket(&self) -> (Rational, Rational) {
        let head = self.head().clone();
        match &self.next_q {
            Some(nq) => (
                &head + Rational::new(BigInt::one(), nq.clone()),
                &head + Rational::new(BigInt::from(2), nq.clone()),
            ),
            None => {
                let l = &self.log2_q[self.depth()];
                let cap = 1u64 << 20;
                let k = l.lo().floor().to_u64().unwrap_or(cap).min(cap);
                let hi = &head + Rational::new(BigInt::from(2), BigInt::one() << k as usize);
                (head, hi)
            }
        }
    }
}

/// Rational center with a positive rational radius; the true angle is
/// somewhere in `[center - radius, center + radius]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalBall {
    pub center: Rational,
    pub radius: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotationNumber {
    Rational(Rational),
    Surd(QuadraticSurd),
    Liouville(Arc<LiouvilleNumber>),
    Ball(DecimalBall),
}

impl RotationNumber {
    pub fn rational(r: Rational) -> Self {
        RotationNumber::Rational(frac(&r))
    }

    pub fn surd(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Ok(RotationNumber::Surd(QuadraticSurd::new(
            a.into(),
            b.into(),
            c.into(),
            d.into(),
        )?))
    }

    /// `(sqrt 5 - 1) / 2`.
    pub fn golden() -> Self {
        RotationNumber::surd(-1, 1, 2, 5).expect("valid surd")
    }

    pub fn liouville(m: u64, depth: Option<usize>) -> Result<Self> {
        Ok(RotationNumber::Liouville(Arc::new(LiouvilleNumber::new(m, depth)?)))
    }

    pub fn ball(center: Rational, radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::domain("ball radius must be positive"));
        }
        Ok(RotationNumber::Ball(DecimalBall {
            center: frac(&center),
            radius,
        }))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            RotationNumber::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, RotationNumber::Rational(_))
    }

    /// Known to be irrational by construction.
    pub fn is_irrational(&self) -> bool {
        matches!(self, RotationNumber::Surd(_) | RotationNumber::Liouville(_))
    }

    pub fn enclose(&self, prec: u32) -> Interval {
        match self {
            RotationNumber::Rational(r) => Interval::from_rational(r, prec),
            RotationNumber::Surd(s) => s.enclose(prec),
            RotationNumber::Liouville(l) => l.enclose(prec),
            RotationNumber::Ball(b) => {
                let lo = Interval::from_rational(&(&b.center - &b.radius), prec);
                let hi = Interval::from_rational(&(&b.center + &b.radius), prec);
                lo.hull(&hi)
            }
        }
    }

    pub fn approx_f64(&self) -> f64 {
        self.enclose(64).mid_f64()
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.618`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let d = parse_int(d)?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(Rational::new(parse_int(n)?, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal: {s:?}")));
        }
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let ip = if ip.is_empty() { BigInt::zero() } else { parse_int(ip)? };
        let scale = BigInt::from(10).pow(fp.len() as u32);
        let v = Rational::new(ip * &scale + parse_int(fp)?, scale);
        return Ok(if neg { -v } else { v });
    }
    Ok(Rational::from_integer(parse_int(s)?))
}

/// Decimal form when the denominator divides a power of ten, else `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_even() {
        d /= 2;
        twos += 1;
    }
    while (&d % 5u32).is_zero() {
        d /= 5;
        fives += 1;
    }
    if !d.is_one() || twos.max(fives) > 30 {
        return r.to_string();
    }
    let digits = twos.max(fives) as usize;
    let scaled = (r * int(BigInt::from(10).pow(digits as u32))).to_integer();
    let neg = scaled.is_negative();
    let s = format!("{:0>width$}", scaled.abs(), width = digits + 1);
    let (ip, fp) = s.split_at(s.len() - digits);
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
}

fn surd_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^\(?\s*([+-]?\s*\d+)\s*([+-])\s*(?:(\d+)\s*\*\s*)?sqrt\(\s*(\d+)\s*\)\s*\)?\s*(?:/\s*([+-]?\d+))?$",
        )
        .unwrap()
    })
}

impl FromStr for RotationNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected <kind>:<value>, got {s:?}")))?;
        match kind.trim() {
            "rational" => Ok(RotationNumber::rational(parse_rational(body)?)),
            "surd" => {
                let caps = surd_regex()
                    .captures(body.trim())
                    .ok_or_else(|| Error::Parse(format!("expected (a+b*sqrt(d))/c, got {body:?}")))?;
                let a = parse_int(&caps[1].replace(' ', ""))?;
                let b = caps.get(3).map_or(Ok(BigInt::one()), |m| parse_int(m.as_str()))?;
                let b = if &caps[2] == "-" { -b } else { b };
                let d = parse_int(&caps[4])?;
                let c = caps.get(5).map_or(Ok(BigInt::one()), |m| parse_int(m.as_str()))?;
                QuadraticSurd::new(a, b, c, d)
                    .map(RotationNumber::Surd)
                    .map_err(|e| Error::Parse(e.to_string()))
            }
            "liouville" => {
                let mut it = body.split(',');
                let m = it
                    .next()
                    .and_then(|m| m.trim().parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad Liouville parameter in {body:?}")))?;
                let depth = match it.next() {
                    Some(j) => Some(
                        j.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad depth in {body:?}")))?,
                    ),
                    None => None,
                };
                if it.next().is_some() {
                    return Err(Error::Parse(format!("too many fields in {body:?}")));
                }
                RotationNumber::liouville(m, depth).map_err(|e| Error::Parse(e.to_string()))
            }
            "ball" => {
                let (c, r) = body
                    .split_once('±')
                    .or_else(|| body.split_once("+-"))
                    .ok_or_else(|| Error::Parse(format!("expected center±radius, got {body:?}")))?;
                RotationNumber::ball(parse_rational(c)?, parse_rational(r)?)
                    .map_err(|e| Error::Parse(e.to_string()))
            }
            other => Err(Error::Parse(format!("unknown number kind {other:?}"))),
        }
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationNumber::Rational(r) => {
                write!(f, "rational:{}/{}", r.numer(), r.denom())
            }
            RotationNumber::Surd(s) => {
                let sign = if s.b.is_negative() { '-' } else { '+' };
                write!(f, "surd:({}{}{}*sqrt({}))/{}", s.a, sign, s.b.abs(), s.d, s.c)
            }
            RotationNumber::Liouville(l) => write!(f, "liouville:{},{}", l.m, l.depth()),
            RotationNumber::Ball(b) => write!(
                f,
                "ball:{}±{}",
                format_rational(&b.center),
                format_rational(&b.radius)
            ),
        }
    }
}

impl Serialize for RotationNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RotationNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
