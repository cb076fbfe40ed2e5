//! Continued fractions, convergents and best-approximation bounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{as_string, Dyadic, Interval, LogMagnitude, Rational, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::rotation::{AngleValue, LinearForm, RotationNumber};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    #[serde(with = "as_string::vec")]
    pub quotients: Vec<BigInt>,
    /// The quotients are the complete expansion of a rational.
    pub finite: bool,
}

impl ContinuedFraction {
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// Value of `[a_0; a_1, ..., a_k]`.
    pub fn value(&self) -> Rational {
        let c = convergents(self, self.len()).expect("length is available");
        let last = c.last().expect("non-empty expansion");
        Rational::new(last.p.clone(), last.q.clone())
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.quotients.iter().enumerate() {
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "; {a}")?,
                _ => write!(f, ", {a}")?,
            }
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    #[serde(with = "as_string")]
    pub p: BigInt,
    #[serde(with = "as_string")]
    pub q: BigInt,
    pub index: usize,
}

impl Convergent {
    pub fn value(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }
}

/// Canonical expansion of a rational by the Euclidean algorithm.
pub fn cf_expand(x: &Rational) -> ContinuedFraction {
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut quotients = Vec::new();
    loop {
        let (a, r) = num.div_mod_floor(&den);
        quotients.push(a);
        if r.is_zero() {
            break;
        }
        num = den;
        den = r;
    }
    ContinuedFraction {
        quotients,
        finite: true,
    }
}

/// The other expansion of a rational: `[..., a]` becomes `[..., a - 1, 1]`.
fn alternate_form(q: &[BigInt]) -> Vec<BigInt> {
    let mut v = q.to_vec();
    let last = v.pop().expect("non-empty");
    v.push(last - 1);
    v.push(BigInt::one());
    v
}

fn common_prefix(a: &[BigInt], b: &[BigInt]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Quotients shared by every irrational in `(lo, hi)`.
pub fn certified_prefix(lo: &Rational, hi: &Rational) -> Vec<BigInt> {
    let l = cf_expand(lo).quotients;
    let h = cf_expand(hi).quotients;
    let forms_l = [alternate_form(&l), l];
    let forms_h = [alternate_form(&h), h];
    let mut best: &[BigInt] = &[];
    for a in &forms_l {
        for b in &forms_h {
            let k = common_prefix(a, b);
            if k > best.len() {
                best = &a[..k];
            }
        }
    }
    best.to_vec()
}

/// The first `k` partial quotients of `x`.
pub fn cf_stream(x: &RotationNumber, k: usize) -> Result<ContinuedFraction> {
    let take = |q: Vec<BigInt>, finite: bool| -> Result<ContinuedFraction> {
        if q.len() < k {
            if finite {
                return Err(Error::FiniteExpansion { available: q.len() });
            }
            return Err(Error::precision(format!(
                "only {} partial quotients can be certified for {x}",
                q.len()
            )));
        }
        let finite = finite && q.len() == k;
        Ok(ContinuedFraction {
            quotients: q[..k].to_vec(),
            finite,
        })
    };
    match x {
        RotationNumber::Rational(r) => take(cf_expand(r).quotients, true),
        RotationNumber::Surd(s) => {
            let e = s.expansion();
            Ok(ContinuedFraction {
                quotients: (0..k).map(|i| e.quotient(i).clone()).collect(),
                finite: false,
            })
        }
        RotationNumber::Liouville(l) => {
            let (lo, hi) = l.rational_bracket();
            take(certified_prefix(&lo, &hi), false)
        }
        RotationNumber::Ball(b) => {
            let prefix = certified_prefix(&(&b.center - &b.radius), &(&b.center + &b.radius));
            take(prefix, false)
        }
    }
}

/// Every quotient that can be certified, capped at `limit`.
pub fn available_quotients(x: &RotationNumber, limit: usize) -> Vec<BigInt> {
    match x {
        RotationNumber::Rational(r) => cf_expand(r).quotients.into_iter().take(limit).collect(),
        RotationNumber::Surd(_) => cf_stream(x, limit).expect("surds never run out").quotients,
        RotationNumber::Liouville(l) => {
            let (lo, hi) = l.rational_bracket();
            certified_prefix(&lo, &hi).into_iter().take(limit).collect()
        }
        RotationNumber::Ball(b) => certified_prefix(&(&b.center - &b.radius), &(&b.center + &b.radius))
            .into_iter()
            .take(limit)
            .collect(),
    }
}

/// `p_k / q_k` for `k = 0..count`.
pub fn convergents(cf: &ContinuedFraction, count: usize) -> Result<Vec<Convergent>> {
    if count > cf.len() {
        return Err(Error::domain(format!(
            "asked for {count} convergents of a {}-term expansion",
            cf.len()
        )));
    }
    Ok(convergents_of(&cf.quotients[..count]))
}

pub fn convergents_of(quotients: &[BigInt]) -> Vec<Convergent> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(quotients.len());
    for (index, a) in quotients.iter().enumerate() {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        p1 = std::mem::replace(&mut p0, p.clone());
        q1 = std::mem::replace(&mut q0, q.clone());
        out.push(Convergent { p, q, index });
    }
    out
}

/// `p_k q_{k-1} - p_{k-1} q_k`, which is `(-1)^{k-1}`.
pub fn determinant(prev: &Convergent, cur: &Convergent) -> BigInt {
    &cur.p * &prev.q - &prev.p * &cur.q
}

/// Convergents of `x` until the denominator exceeds `bound` (the first such
/// one included).
pub fn convergents_beyond(x: &RotationNumber, bound: &BigInt) -> Result<Vec<Convergent>> {
    let mut k = 16;
    loop {
        let q = available_quotients(x, k);
        let conv = convergents_of(&q);
        if let Some(pos) = conv.iter().position(|c| &c.q > bound) {
            return Ok(conv[..=pos].to_vec());
        }
        if q.len() < k {
            return Err(match x {
                RotationNumber::Rational(_) => Error::FiniteExpansion { available: q.len() },
                _ => Error::precision(format!(
                    "insufficient convergents: {} certified quotients of {x} stop below denominator {bound}",
                    q.len()
                )),
            });
        }
        k *= 2;
    }
}

/// Lower bound on `||n x||` valid for every `n` in `[from, to]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxBound {
    #[serde(with = "as_string")]
    pub from: BigInt,
    #[serde(with = "as_string")]
    pub to: BigInt,
    pub convergent: Convergent,
    /// Enclosure of `||q_k x||`, the minimum over the range.
    pub distance: LogMagnitude,
    /// `1 / (q_k + q_{k+1})`.
    #[serde(with = "as_string")]
    pub analytic: Rational,
}

impl ApproxBound {
    /// Best certified lower bound on `log2 ||n x||` over the range.
    pub fn log2_lower(&self, prec: u32) -> Dyadic {
        let a = LogMagnitude::from_rational(&self.analytic, prec).expect("positive");
        let a = a.log2_lo().unwrap().clone();
        self.distance.log2_lo().cloned().map_or(a.clone(), |d| d.max(a))
    }
}

/// Enclosure of `||q x||` in log form.
pub fn distance_log(x: &RotationNumber, q: &BigInt, prec: u32) -> Result<LogMagnitude> {
    let f = LinearForm::of(x).scale(q);
    let mut p = prec;
    for _ in 0..8 {
        match f.distance_to_integer(p)? {
            AngleValue::Enclosed(i) if !i.is_positive() && !f.has_ball() => p *= 2,
            v => return v.to_log(p),
        }
    }
    Err(Error::precision("could not separate q x from an integer"))
}

pub fn best_approx_lower_bound(x: &RotationNumber, horizon: u64) -> Result<Vec<ApproxBound>> {
    if let RotationNumber::Rational(r) = x {
        return Err(Error::domain(format!(
            "rational rotation number: ||n x|| is periodic with period {} and vanishes at its multiples",
            r.denom()
        )));
    }
    let n_max = BigInt::from(horizon);
    let conv = convergents_beyond(x, &n_max)?;
    let mut out = Vec::new();
    for w in conv.windows(2) {
        let (c, next) = (&w[0], &w[1]);
        if c.q >= next.q || c.q > n_max {
            continue;
        }
        let to = (&next.q - BigInt::one()).min(n_max.clone());
        out.push(ApproxBound {
            from: c.q.clone(),
            to,
            convergent: c.clone(),
            distance: distance_log(x, &c.q, DEFAULT_PRECISION)?,
            analytic: Rational::new(BigInt::one(), &c.q + &next.q),
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Bounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// `(k, log q_{k+1} / log q_k)` over the scanned denominators.
    pub ratios: Vec<(usize, Interval)>,
    pub max_ratio: Interval,
    pub last_ratio: Interval,
    /// `1 + last_ratio`, the finite-horizon proxy for the irrationality exponent.
    pub exponent: Interval,
    pub trend: Trend,
}

/// Ratio growth `log q_{k+1} / log q_k` over `count` denominators. Liouville
/// numbers use their construction denominators, which stay in log form.
pub fn irrationality_exponent_estimate(x: &RotationNumber, count: usize) -> Result<ExponentEstimate> {
    if count < 3 {
        return Err(Error::domain("need at least three denominators"));
    }
    let prec = DEFAULT_PRECISION;
    let logs: Vec<Interval> = match x {
        RotationNumber::Rational(_) => {
            return Err(Error::domain("rational numbers have no irrationality exponent"))
        }
        RotationNumber::Liouville(l) => {
            let avail = l.log2_q();
            if avail.len() < count {
                return Err(Error::precision(format!(
                    "only {} denominators of {x} are known",
                    avail.len()
                )));
            }
            avail[..count].to_vec()
        }
        _ => {
            let mut k = count + 4;
            loop {
                let q = available_quotients(x, k);
                let conv: Vec<_> = convergents_of(&q)
                    .into_iter()
                    .filter(|c| c.q > BigInt::one())
                    .collect();
                if conv.len() >= count {
                    break conv[..count]
                        .iter()
                        .map(|c| crate::arith::transcendental::log2_bigint(&c.q, prec))
                        .collect::<Result<_>>()?;
                }
                if q.len() < k {
                    return Err(Error::precision(format!(
                        "only {} convergents of {x} can be certified",
                        conv.len()
                    )));
                }
                k *= 2;
            }
        }
    };
    let ratios: Vec<(usize, Interval)> = logs
        .windows(2)
        .enumerate()
        .map(|(k, w)| Ok((k + 1, w[1].div(&w[0])?)))
        .collect::<Result<_>>()?;
    let max_ratio = ratios
        .iter()
        .map(|r| r.1.clone())
        .reduce(|a, b| a.max(&b))
        .expect("at least two ratios");
    let last_ratio = ratios.last().unwrap().1.clone();
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    let increasing = tail.len() == 3
        && tail
            .windows(2)
            .all(|w| w[0].1.certainly_lt(&w[1].1) == Some(true));
    Ok(ExponentEstimate {
        exponent: last_ratio.add(&Interval::from_int(1, prec)),
        ratios,
        max_ratio,
        last_ratio,
        trend: if increasing {
            Trend::Increasing
        } else {
            Trend::Bounded
        },
    })
}

pub fn is_canonical(cf: &ContinuedFraction) -> bool {
    cf.quotients.iter().skip(1).all(|a| a.is_positive())
        && (!cf.finite || cf.len() == 1 || cf.quotients.last().unwrap() >= &BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(cf_expand(&rat(1, 2)).quotients, ints(&[0, 2]));
        assert_eq!(cf_expand(&rat(3, 4)).quotients, ints(&[0, 1, 3]));
        let c = cf_expand(&rat(193, 256));
        assert_eq!(c.quotients, ints(&[0, 1, 3, 15, 1, 3]));
        assert_eq!(c.value(), rat(193, 256));
        assert_eq!(c.to_string(), "[0; 1, 3, 15, 1, 3]");
        assert!(is_canonical(&c));
    }

    #[test]
    fn stream_examples() {
        let g = cf_stream(&RotationNumber::golden(), 5).unwrap();
        assert_eq!(g.quotients, ints(&[0, 1, 1, 1, 1]));
        let s2: RotationNumber = "surd:(-1+1*sqrt(2))/1".parse().unwrap();
        assert_eq!(cf_stream(&s2, 4).unwrap().quotients, ints(&[0, 2, 2, 2]));
        let e = cf_stream(&RotationNumber::rational(rat(1, 2)), 5).unwrap_err();
        assert_eq!(e, Error::FiniteExpansion { available: 2 });
    }

    #[test]
    fn convergent_examples() {
        let c = convergents(&cf_expand(&rat(193, 256)), 6).unwrap();
        let pq: Vec<(i64, i64)> = c
            .iter()
            .map(|c| (c.p.to_string().parse().unwrap(), c.q.to_string().parse().unwrap()))
            .collect();
        assert_eq!(pq, [(0, 1), (1, 1), (3, 4), (46, 61), (49, 65), (193, 256)]);
        let g = convergents(&cf_stream(&RotationNumber::golden(), 6).unwrap(), 6).unwrap();
        let pq: Vec<String> = g.iter().map(|c| format!("{}/{}", c.p, c.q)).collect();
        assert_eq!(pq, ["0/1", "1/1", "1/2", "2/3", "3/5", "5/8"]);
        for w in g.windows(2) {
            assert_eq!(determinant(&w[0], &w[1]).abs(), BigInt::one());
        }
    }

    #[test]
    fn liouville_prefix() {
        let x = RotationNumber::liouville(2, None).unwrap();
        let cf = cf_stream(&x, 8).unwrap();
        assert_eq!(cf.quotients[..6], ints(&[0, 1, 3, 15, 1, 2]));
        let conv = convergents_beyond(&x, &BigInt::from(256)).unwrap();
        let qs: Vec<String> = conv.iter().map(|c| c.q.to_string()).collect();
        assert_eq!(qs[..7], ["1", "1", "4", "61", "65", "191", "256"]);
        let shallow = RotationNumber::liouville(2, Some(2)).unwrap();
        assert!(cf_stream(&shallow, 40).unwrap_err().is_precision_failure());
    }

    #[test]
    fn golden_best_approx() {
        let b = best_approx_lower_bound(&RotationNumber::golden(), 8).unwrap();
        let r = b.iter().find(|b| b.from == BigInt::from(5)).unwrap();
        assert_eq!(r.to, BigInt::from(7));
        assert_eq!(r.analytic, rat(1, 13));
        assert!((r.distance.approx_log2().exp2() - 0.090_169_943_749_474_24).abs() < 1e-12);
        assert!(best_approx_lower_bound(&RotationNumber::rational(rat(1, 3)), 10).is_err());
    }

    #[test]
    fn exponent_trends() {
        let g = irrationality_exponent_estimate(&RotationNumber::golden(), 20).unwrap();
        assert_eq!(g.trend, Trend::Bounded);
        assert!(g.last_ratio.hi().to_f64() < 1.1);
        let x = RotationNumber::liouville(2, None).unwrap();
        let e = irrationality_exponent_estimate(&x, 4).unwrap();
        assert_eq!(e.trend, Trend::Increasing);
        assert_eq!(e.ratios[2].1, Interval::from_int(256, DEFAULT_PRECISION));
        let s2: RotationNumber = "surd:(-1+1*sqrt(2))/1".parse().unwrap();
        assert_eq!(irrationality_exponent_estimate(&s2, 20).unwrap().trend, Trend::Bounded);
    }
}
