//! Power-series coefficients, the seminorms `sup |a_n| alpha^n`, and the
//! coefficientwise resolvent `a_n -> a_n / (r^n - lambda)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::transcendental::{sin_pi_with, GUARD_BITS};
use crate::arith::{
    as_string, frac, int, pi, Dyadic, Interval, LogMagnitude, Magnitude, PrecisionPolicy, Rational,

};
use crate::error::{Error, Result};
use crate::rotation::number::{format_rational, parse_rational};
use crate::rotation::{DivisorEngine, LinearForm, RotationNumber};
use crate::spectrum::Lambda;

/// A complex number with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactComplex {
    #[serde(with = "as_string")]
    pub re: Rational,
    #[serde(with = "as_string")]
    pub im: Rational,
}

impl ExactComplex {
    pub fn real(re: Rational) -> Self {
        ExactComplex {
            re,
            im: Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Magnitude {
        exact_sqrt_magnitude(&self.norm_sqr())
    }

    fn sub(&self, o: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn div(&self, o: &ExactComplex) -> Option<ExactComplex> {
        let n = o.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(ExactComplex {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        })
    }

    fn enclose(&self, prec: u32) -> ComplexInterval {
        ComplexInterval {
            re: Interval::from_rational(&self.re, prec),
            im: Interval::from_rational(&self.im, prec),
        }
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", format_rational(&self.re), format_rational(&self.im))
    }
}

impl FromStr for ExactComplex {
    type Err = Error;

    /// `re` or `re,im`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(',') {
            Some((re, im)) => Ok(ExactComplex {
                re: parse_rational(re)?,
                im: parse_rational(im)?,
            }),
            None => Ok(ExactComplex::real(parse_rational(s)?)),
        }
    }
}

/// `sqrt(v)`, exact when `v` is the square of a rational.
fn exact_sqrt_magnitude(v: &Rational) -> Magnitude {
    if v.is_zero() {
        return Magnitude::Zero;
    }
    let (n, d) = (v.numer(), v.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Magnitude::Exact(Rational::new(rn, rd))
    } else {
        Magnitude::Sqrt(v.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    fn sub(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    fn norm_sqr(&self) -> Interval {
        self.re.square().add(&self.im.square())
    }

    fn div(&self, o: &ComplexInterval) -> Result<ComplexInterval> {
        let n = o.norm_sqr();
        Ok(ComplexInterval {
            re: self.re.mul(&o.re).add(&self.im.mul(&o.im)).div(&n)?,
            im: self.im.mul(&o.re).sub(&self.re.mul(&o.im)).div(&n)?,
        })
    }

    pub fn contains(&self, z: &ExactComplex) -> bool {
        self.re.contains_rational(&z.re) && self.im.contains_rational(&z.im)
    }
}

/// `(cos 2 pi t, sin 2 pi t)` when both are rational.
fn cis_exact(t: &Rational) -> Option<ExactComplex> {
    let t = frac(t);
    let d = t.denom().clone();
    if !(d == BigInt::from(1) || d == BigInt::from(2) || d == BigInt::from(4)) {
        return None;
    }
    crate::arith::unit_root_rational(&t).map(|(c, s)| ExactComplex { re: c, im: s })
}

/// `cos 2 pi t` when it is rational: `t` in sixths or quarters.
fn cos_turns_exact(t: &Rational) -> Option<Rational> {
    let k = frac(t) * int(12);
    if !k.is_integer() {
        return None;
    }
    let v = match k.to_integer().to_string().as_str() {
        "0" => int(1),
        "2" | "10" => Rational::new(1.into(), 2.into()),
        "3" | "9" => int(0),
        "4" | "8" => Rational::new((-1).into(), 2.into()),
        "6" => int(-1),
        _ => return None,
    };
    Some(v)
}

/// `sin 2 pi t` when it is rational.
fn sin_turns_exact(t: &Rational) -> Option<Rational> {
    cos_turns_exact(&(t - Rational::new(1.into(), 4.into())))
}

/// Enclosure of `e^{2 pi i theta}` for `theta` reduced into `[-1/2, 1/2]`.
fn cis_interval(theta: &Interval, pi: &Interval) -> Result<ComplexInterval> {
    let prec = theta.precision_bits();
    let a = theta.abs();
    if a.hi() >= &Dyadic::one() {
        return Err(Error::precision("angle enclosure too wide"));
    }
    let s = if a.hi() <= &Dyadic::pow2(-1) {
        sin_pi_with(&a, pi)?
    } else {
        // sin(pi a) = sin(pi min(a, 1 - a)), and that minimum is at most 1/2
        let d = a.min(&Interval::from_int(1, prec).sub(&a));
        let hi = d.hi().clone().min(Dyadic::pow2(-1));
        sin_pi_with(&Interval::new(d.lo().clone(), hi, prec), pi)?
    };
    // cos(pi a) = sin(pi (1/2 - a)), with the sign of 1/2 - a
    let h = Interval::point(Dyadic::pow2(-1), prec).sub(&a);
    let c = sin_pi_with(&h.abs(), pi)?;
    let c = if !h.lo().is_negative() {
        c
    } else if !h.hi().is_positive() {
        c.neg()
    } else {
        c.neg().hull(&c)
    };
    let re = c.square().sub(&s.square());
    let m = s.mul(&c).shl(1);
    let im = if !theta.lo().is_negative() {
        m
    } else if !theta.hi().is_positive() {
        m.neg()
    } else {
        m.neg().hull(&m)
    };
    Ok(ComplexInterval { re, im })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CoefficientStream {
    /// Listed coefficients, zero elsewhere.
    Finite(Vec<(u64, ExactComplex)>),
    /// `a_n = 1`.
    Ones,
    /// `a_n = ratio^n`.
    #[serde(with = "as_string")]
    Geometric(Rational),
    /// `a_1 .. a_N` read from a table.
    Tabulated(Vec<ExactComplex>),
}

impl CoefficientStream {
    pub fn coefficient(&self, n: u64) -> ExactComplex {
        match self {
            CoefficientStream::Finite(v) => v
                .iter()
                .find(|(k, _)| *k == n)
                .map(|(_, a)| a.clone())
                .unwrap_or_else(|| ExactComplex::real(Rational::zero())),
            CoefficientStream::Ones => ExactComplex::real(Rational::one()),
            CoefficientStream::Geometric(g) => ExactComplex::real(g.pow(n as i32)),
            CoefficientStream::Tabulated(v) => match n {
                0 => ExactComplex::real(Rational::zero()),
                _ => v
                    .get(n as usize - 1)
                    .cloned()
                    .unwrap_or_else(|| ExactComplex::real(Rational::zero())),
            },
        }
    }

    /// Coefficients are known up to this index, if only finitely many are.
    pub fn available(&self) -> Option<u64> {
        match self {
            CoefficientStream::Tabulated(v) => Some(v.len() as u64),
            _ => None,
        }
    }

    fn check_horizon(&self, horizon: u64) -> Result<()> {
        match self.available() {
            Some(k) if k < horizon => Err(Error::domain(format!(
                "only {k} tabulated coefficients, horizon {horizon} requested"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for CoefficientStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientStream::Ones => write!(f, "ones"),
            CoefficientStream::Geometric(g) => write!(f, "geometric:{}", format_rational(g)),
            CoefficientStream::Finite(v) => {
                write!(f, "finite:")?;
                for (i, (n, a)) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{n}={a}")?;
                }
                Ok(())
            }
            CoefficientStream::Tabulated(v) => write!(f, "tabulated[{}]", v.len()),
        }
    }
}

impl FromStr for CoefficientStream {
    type Err = Error;

    /// `ones`, `geometric:g` or `finite:n=re[,im];...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ones" {
            return Ok(CoefficientStream::Ones);
        }
        if let Some(g) = s.strip_prefix("geometric:") {
            return Ok(CoefficientStream::Geometric(parse_rational(g)?));
        }
        if let Some(list) = s.strip_prefix("finite:") {
            let mut v = Vec::new();
            for item in list.split(';').filter(|t| !t.trim().is_empty()) {
                let (n, a) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected n=value, got {item:?}")))?;
                let n = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index {n:?}")))?;
                v.push((n, a.parse()?));
            }
            return Ok(CoefficientStream::Finite(v));
        }
        Err(Error::Parse(format!(
            "expected ones, geometric:<g> or finite:<n>=<a>;..., got {s:?}"
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seminorm {
    /// `max_{n <= N} |a_n| alpha^n`.
    pub value: Interval,
    pub argmax: u64,
    pub tail_note: Option<String>,
}

/// `P_alpha(f)` over `1 <= n <= N`.
pub fn seminorm(f: &CoefficientStream, alpha: &Rational, horizon: u64) -> Result<Seminorm> {
    if !(alpha.is_positive() && alpha < &Rational::one()) {
        return Err(Error::domain("alpha must lie in (0, 1)"));
    }
    if horizon == 0 {
        return Err(Error::domain("horizon must be positive"));
    }
    f.check_horizon(horizon)?;
    let prec = crate::arith::DEFAULT_PRECISION;
    let mut best: Option<(Interval, u64)> = None;
    let mut pow = Rational::one();
    for n in 1..=horizon {
        pow *= alpha;
        let a = f.coefficient(n);
        let v = match a.abs() {
            Magnitude::Exact(r) => Interval::from_rational(&(r * &pow), prec),
            m => m.to_interval(prec)?.mul_rational(&pow),
        };
        best = Some(match best {
            Some((b, k)) if b.lo() >= v.lo() => (b.max(&v), k),
            Some((b, _)) => (b.max(&v), n),
            None => (v, n),
        });
    }
    let tail_note = match f {
        CoefficientStream::Ones => Some("eventually decreasing: |a_{n+1}/a_n| = 1 < 1/alpha".into()),
        CoefficientStream::Geometric(g) => {
            let ratio = g.abs() * alpha;
            Some(if ratio < Rational::one() {
                format!("eventually decreasing: |a_{{n+1}}/a_n| alpha = {}", format_rational(&ratio))
            } else if ratio == Rational::one() {
                "constant terms: |a_n| alpha^n = 1".into()
            } else {
                "terms grow; the seminorm is infinite".into()
            })
        }
        CoefficientStream::Finite(v) => {
            let last = v.iter().map(|(n, _)| *n).max().unwrap_or(0);
            (last <= horizon).then(|| format!("zero beyond n = {last}"))
        }
        CoefficientStream::Tabulated(_) => None,
    };
    let (value, argmax) = best.expect("horizon is positive");
    Ok(Seminorm {
        value,
        argmax,
        tail_note,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformedEntry {
    pub n: u64,
    pub a: ExactComplex,
    /// `|r^n - lambda|`.
    pub divisor: Magnitude,
    /// `r^n - lambda`, exactly when its parts are rational.
    pub shift_exact: Option<ExactComplex>,
    pub shift: Option<ComplexInterval>,
    /// `|b_n|`.
    pub magnitude: Magnitude,
    pub b_exact: Option<ExactComplex>,
    pub b: Option<ComplexInterval>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformedStream {
    pub base: CoefficientStream,
    pub x: Option<RotationNumber>,
    pub lambda: Option<Lambda>,
    pub entries: Vec<TransformedEntry>,
    /// Off the circle: `|r^n - lambda| >= delta` for every `n`.
    pub delta: Option<Magnitude>,
}

impl TransformedStream {
    /// The stream itself with unit divisors.
    pub fn untransformed(f: &CoefficientStream, horizon: u64) -> Result<Self> {
        f.check_horizon(horizon)?;
        let entries = (1..=horizon)
            .map(|n| {
                let a = f.coefficient(n);
                TransformedEntry {
                    n,
                    divisor: Magnitude::Exact(Rational::one()),
                    shift_exact: Some(ExactComplex::real(Rational::one())),
                    shift: None,
                    magnitude: a.abs(),
                    b_exact: Some(a.clone()),
                    b: None,
                    a,
                }
            })
            .collect();
        Ok(TransformedStream {
            base: f.clone(),
            x: None,
            lambda: None,
            entries,
            delta: None,
        })
    }

    pub fn entry(&self, n: u64) -> Option<&TransformedEntry> {
        self.entries.iter().find(|e| e.n == n)
    }
}

/// `|a| / d` in the tier the divisor allows.
fn quotient(a: &ExactComplex, d: &Magnitude, prec: u32) -> Result<Magnitude> {
    if a.is_zero() {
        return Ok(Magnitude::Zero);
    }
    let an = a.norm_sqr();
    match (d, a.abs()) {
        (Magnitude::Exact(r), Magnitude::Exact(s)) => Ok(Magnitude::Exact(s / r)),
        (Magnitude::Exact(r), _) => Ok(exact_sqrt_magnitude(&(an / (r * r)))),
        (Magnitude::Sqrt(r), _) => Ok(exact_sqrt_magnitude(&(an / r))),
        (Magnitude::Log(l), m) => Ok(Magnitude::Log(m.to_log(prec)?.div(l)?)),
        (Magnitude::Enclosed(i), m) => Magnitude::from_interval(m.to_interval(prec)?.div(i)?),
        (Magnitude::Zero, _) => Err(Error::domain("division by a zero divisor")),
    }
}

/// `b_n = a_n / (r^n - lambda)` for `1 <= n <= N`.
pub fn resolvent_apply(
    f: &CoefficientStream,
    x: &RotationNumber,
    lambda: &Lambda,
    horizon: u64,
    policy: PrecisionPolicy,
) -> Result<TransformedStream> {
    f.check_horizon(horizon)?;
    let prec = policy.start;
    let pi_w = pi(prec + GUARD_BITS);
    let xf = LinearForm::of(x);
    let mut entries = Vec::with_capacity(horizon as usize);
    let delta = match lambda {
        Lambda::Complex { re, im } => {
            let z = ExactComplex {
                re: re.clone(),
                im: im.clone(),
            };
            let n2 = z.norm_sqr();
            if n2 == Rational::one() {
                return Err(Error::domain(
                    "lambda on the circle must be given as angle:<x> or orbit:<n>",
                ));
            }
            let d = match z.abs() {
                Magnitude::Exact(r) => Magnitude::Exact((Rational::one() - r).abs()),
                m => Magnitude::from_interval(
                    Interval::from_int(1, prec).sub(&m.to_interval(prec)?).abs(),
                )?,
            };
            for n in 1..=horizon {
                entries.push(off_circle_entry(f, &xf, &z, n, prec, &pi_w)?);
            }
            Some(d)
        }
        Lambda::Circle(y) => {
            let engine = DivisorEngine::new(x, y, policy);
            let yf = y.form(x);
            let ly = match yf.as_exact().map(|t| (cis_exact(t), t)) {
                Some((Some(l), _)) => (Some(l), None),
                Some((None, t)) => {
                    let t = Interval::from_rational(&(t - t.round()), prec);
                    (None, Some(cis_interval(&t, &pi_w)?))
                }
                None => (None, Some(cis_interval(&yf.reduce(prec)?.0, &pi_w)?)),
            };
            for n in 1..=horizon {
                let sd = engine.eval(n)?;
                if sd.eigen {
                    return Err(Error::EigenCollision { n });
                }
                let a = f.coefficient(n);
                let nx = xf.scale(&BigInt::from(n));
                let (shift_exact, shift) = match (nx.as_exact().and_then(cis_exact), &ly) {
                    (Some(r), (Some(l), _)) => (Some(r.sub(l)), None),
                    (r, (l_exact, l_int)) => {
                        let rn = match r {
                            Some(r) => r.enclose(prec),
                            None => cis_interval(&nx.reduce(prec)?.0, &pi_w)?,
                        };
                        let l = match (l_exact, l_int) {
                            (Some(l), _) => l.enclose(prec),
                            (None, Some(l)) => l.clone(),
                            _ => unreachable!("lambda enclosure is set"),
                        };
                        (None, Some(rn.sub(&l)))
                    }
                };
                entries.push(finish_entry(n, a, sd.divisor, shift_exact, shift, prec)?);
            }
            None
        }
    };
    Ok(TransformedStream {
        base: f.clone(),
        x: Some(x.clone()),
        lambda: Some(lambda.clone()),
        entries,
        delta,
    })
}

fn off_circle_entry(
    f: &CoefficientStream,
    xf: &LinearForm,
    z: &ExactComplex,
    n: u64,
    prec: u32,
    pi_w: &Interval,
) -> Result<TransformedEntry> {
    let a = f.coefficient(n);
    let nx = xf.scale(&BigInt::from(n));
    if let Some(t) = nx.as_exact() {
        if let Some(r) = cis_exact(t) {
            let d = r.sub(z);
            return finish_entry(n, a, d.abs(), Some(d), None, prec);
        }
        // |r^n - z|^2 = 1 + |z|^2 - 2 (re z cos + im z sin)
        let c = if z.re.is_zero() { Some(Rational::zero()) } else { cos_turns_exact(t) };
        let s = if z.im.is_zero() { Some(Rational::zero()) } else { sin_turns_exact(t) };
        if let (Some(c), Some(s)) = (c, s) {
            let n2 = Rational::one() + z.norm_sqr() - int(2) * (&z.re * c + &z.im * s);
            let rn = cis_interval(&Interval::from_rational(&(t - t.round()), prec), pi_w)?;
            let shift = rn.sub(&z.enclose(prec));
            return finish_entry(n, a, exact_sqrt_magnitude(&n2), None, Some(shift), prec);
        }
    }
    let rn = cis_interval(&nx.reduce(prec)?.0, pi_w)?;
    let shift = rn.sub(&z.enclose(prec));
    let d = Magnitude::from_interval(shift.norm_sqr().sqrt()?)?;
    finish_entry(n, a, d, None, Some(shift), prec)
}

fn finish_entry(
    n: u64,
    a: ExactComplex,
    divisor: Magnitude,
    shift_exact: Option<ExactComplex>,
    shift: Option<ComplexInterval>,
    prec: u32,
) -> Result<TransformedEntry> {
    if divisor.is_zero() {
        return Err(Error::EigenCollision { n });
    }
    let magnitude = quotient(&a, &divisor, prec)?;
    let b_exact = shift_exact.as_ref().and_then(|d| a.div(d));
    let b = match (&b_exact, &shift) {
        (None, Some(s)) if s.norm_sqr().is_positive() => Some(a.enclose(prec).div(s)?),
        _ => None,
    };
    Ok(TransformedEntry {
        n,
        a,
        divisor,
        shift_exact,
        shift,
        magnitude,
        b_exact,
        b,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusBound {
    /// Enclosure of `min_{n in window} |b_n|^{-1/n}`.
    pub bound: Interval,
    pub argmin: u64,
    pub log2_bound: LogMagnitude,
}

/// Upper bound on the radius of convergence suggested by the window; `None`
/// when every coefficient in the window vanishes.
pub fn radius_window_estimate(t: &TransformedStream, window: &[u64]) -> Result<Option<RadiusBound>> {
    if window.is_empty() {
        return Err(Error::domain("empty window"));
    }
    let prec = crate::arith::DEFAULT_PRECISION;
    let mut best: Option<RadiusBound> = None;
    for &n in window {
        let e = t
            .entry(n)
            .ok_or_else(|| Error::domain(format!("index {n} was not computed")))?;
        if e.magnitude.is_zero() || n == 0 {
            continue;
        }
        let l = e.magnitude.to_log(prec)?.root(n, prec).recip()?;
        let v = l.to_interval(prec)?;
        let better = match &best {
            None => true,
            Some(b) => v.lo() < b.bound.lo(),
        };
        if better {
            let bound = match &best {
                Some(b) => b.bound.min(&v),
                None => v,
            };
            best = Some(RadiusBound {
                bound,
                argmin: n,
                log2_bound: l,
            });
        } else if let Some(b) = &mut best {
            b.bound = b.bound.min(&v);
        }
    }
    Ok(best)
}

fn log2_bounds(m: &Magnitude) -> (String, String) {
    match m.to_log(crate::arith::DEFAULT_PRECISION) {
        Ok(l) if !l.is_zero() => (
            format!("{:.6}", l.log2_lo().unwrap().to_f64()),
            format!("{:.6}", l.log2_hi().unwrap().to_f64()),
        ),
        _ => ("-inf".into(), "-inf".into()),
    }
}

/// CSV columns `n, re(a_n), im(a_n), divisor_log2_lo, divisor_log2_hi,
/// b_n_log2_magnitude`.
pub fn write_csv<W: Write>(t: &TransformedStream, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::domain(format!("csv output failed: {e}"));
    w.write_record([
        "n",
        "re(a_n)",
        "im(a_n)",
        "divisor_log2_lo",
        "divisor_log2_hi",
        "b_n_log2_magnitude",
    ])
    .map_err(io)?;
    for e in &t.entries {
        let (lo, hi) = log2_bounds(&e.divisor);
        let b = if e.magnitude.is_zero() {
            "-inf".to_string()
        } else {
            format!("{:.6}", e.magnitude.approx_log2())
        };
        w.write_record([
            e.n.to_string(),
            format_rational(&e.a.re),
            format_rational(&e.a.im),
            lo,
            hi,
            b,
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::domain(format!("csv output failed: {e}")))
}

/// Reads `n, re, im` rows (header optional) into a tabulated stream.
pub fn read_coefficients_csv<R: std::io::Read>(input: R) -> Result<CoefficientStream> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows: Vec<(u64, ExactComplex)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let Ok(n) = rec.get(0).unwrap_or("").parse::<u64>() else {
            continue;
        };
        let re = parse_rational(rec.get(1).unwrap_or("0"))?;
        let im = match rec.get(2) {
            Some(s) if !s.is_empty() => parse_rational(s)?,
            _ => Rational::zero(),
        };
        rows.push((n, ExactComplex { re, im }));
    }
    let len = rows.iter().map(|(n, _)| *n).max().unwrap_or(0);
    let mut v = vec![ExactComplex::real(Rational::zero()); len as usize];
    for (n, a) in rows {
        if n == 0 {
            return Err(Error::domain("tabulated coefficients start at n = 1"));
        }
        v[n as usize - 1] = a;
    }
    Ok(CoefficientStream::Tabulated(v))
}
