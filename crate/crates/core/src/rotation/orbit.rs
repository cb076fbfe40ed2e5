//! Gaps between the orbit points `{n x mod 1 : 1 <= n <= N}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::number::RotationNumber;
use crate::arith::{as_string, int, Interval, PrecisionPolicy, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapClass {
    pub length: Interval,
    #[serde(with = "as_string::option")]
    pub exact: Option<Rational>,
    pub multiplicity: u64,
    /// Every gap in the class equals `dn * x - dk`.
    pub step: Option<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub points: u64,
    /// Sorted by increasing length.
    pub classes: Vec<GapClass>,
    pub max_gap: Interval,
    /// With three classes: whether the largest is exactly the sum of the others.
    pub largest_is_sum: Option<bool>,
}

impl GapReport {
    pub fn distinct(&self) -> usize {
        self.classes.len()
    }
}

pub fn orbit_gaps(x: &RotationNumber, n_points: u64, policy: PrecisionPolicy) -> Result<GapReport> {
    if n_points < 2 {
        return Err(Error::domain("orbit_gaps needs at least two points"));
    }
    match x {
        RotationNumber::Rational(r) => Ok(rational_gaps(r, n_points, policy.start)),
        RotationNumber::Ball(_) => irrational_gaps(x, n_points, policy.start),
        _ => policy.refine(|prec| irrational_gaps(x, n_points, prec)),
    }
}

fn rational_gaps(x: &Rational, n_points: u64, prec: u32) -> GapReport {
    let q = x.denom().clone();
    let p = x.numer().mod_floor(&q);
    let mut residues: Vec<BigInt> = (1..=n_points).map(|n| (&p * n).mod_floor(&q)).collect();
    residues.sort();
    let mut by_len: BTreeMap<Rational, u64> = BTreeMap::new();
    for w in residues.windows(2) {
        *by_len.entry(Rational::new(&w[1] - &w[0], q.clone())).or_default() += 1;
    }
    let wrap = Rational::new(&q + &residues[0] - residues.last().unwrap(), q.clone());
    *by_len.entry(wrap).or_default() += 1;
    let classes: Vec<GapClass> = by_len
        .into_iter()
        .map(|(len, multiplicity)| GapClass {
            length: Interval::from_rational(&len, prec),
            exact: Some(len),
            multiplicity,
            step: None,
        })
        .collect();
    let largest_is_sum = (classes.len() == 3).then(|| {
        let e = |i: usize| classes[i].exact.clone().unwrap();
        e(2) == e(0) + e(1)
    });
    GapReport {
        points: n_points,
        max_gap: classes.last().unwrap().length.clone(),
        classes,
        largest_is_sum,
    }
}

fn irrational_gaps(x: &RotationNumber, n_points: u64, prec: u32) -> Result<GapReport> {
    let w = prec + 2 * (64 - n_points.leading_zeros());
    let xe = x.enclose(w);
    // (fractional part enclosure, n, floor(n x))
    let mut pts: Vec<(Interval, i64, i64)> = Vec::with_capacity(n_points as usize);
    for n in 1..=n_points {
        let v = xe.mul_int(&BigInt::from(n));
        let f = v.lo().floor();
        if v.hi().floor() != f {
            return Err(Error::precision(format!("cannot certify floor({n} x) at {prec} bits")));
        }
        let fi = f.to_i64().ok_or_else(|| Error::domain("orbit too long"))?;
        let frac = v.sub(&Interval::from_int(f, w));
        pts.push((frac, n as i64, fi));
    }
    pts.sort_by(|a, b| a.0.lo().cmp(b.0.lo()));
    for w2 in pts.windows(2) {
        if w2[0].0.hi() >= w2[1].0.lo() {
            return Err(Error::precision(format!(
                "orbit points {} and {} not separated at {prec} bits",
                w2[0].1, w2[1].1
            )));
        }
    }
    let mut by_step: BTreeMap<(i64, i64), (Interval, u64)> = BTreeMap::new();
    let mut push = |dn: i64, dk: i64, len: Interval| {
        by_step
            .entry((dn, dk))
            .and_modify(|e| e.1 += 1)
            .or_insert((len, 1));
    };
    for w2 in pts.windows(2) {
        let (a, b) = (&w2[0], &w2[1]);
        push(b.1 - a.1, b.2 - a.2, b.0.sub(&a.0));
    }
    let (first, last) = (&pts[0], pts.last().unwrap());
    push(
        first.1 - last.1,
        first.2 - last.2 - 1,
        first.0.sub(&last.0).add(&Interval::from_int(1, w)),
    );
    // Same step means the same length; lengths of different steps differ
    // for irrational x, so order them by enclosure.
    let mut classes: Vec<GapClass> = by_step
        .into_iter()
        .map(|(step, (len, multiplicity))| GapClass {
            length: len.with_precision(prec),
            exact: None,
            multiplicity,
            step: Some(step),
        })
        .collect();
    classes.sort_by(|a, b| a.length.lo().cmp(b.length.lo()));
    let is_ball = matches!(x, RotationNumber::Ball(_));
    for c in classes.windows(2) {
        if c[0].length.hi() >= c[1].length.lo() && !is_ball {
            return Err(Error::precision("gap lengths not separated"));
        }
    }
    let largest_is_sum = (classes.len() == 3).then(|| {
        let s = |i: usize| classes[i].step.unwrap();
        let (a, b, c) = (s(0), s(1), s(2));
        a.0 + b.0 == c.0 && a.1 + b.1 == c.1
    });
    let max_gap = classes
        .iter()
        .map(|c| c.length.clone())
        .reduce(|a, b| a.max(&b))
        .unwrap();
    Ok(GapReport {
        points: n_points,
        classes,
        max_gap,
        largest_is_sum,
    })
}

/// Sum of `multiplicity * length` enclosures; must contain 1.
pub fn total_length(r: &GapReport) -> Interval {
    let prec = r.max_gap.precision_bits();
    r.classes.iter().fold(Interval::zero(prec), |acc, c| {
        acc.add(&c.length.mul_int(&BigInt::from(c.multiplicity)))
    })
}

pub fn exact_total(r: &GapReport) -> Option<Rational> {
    r.classes.iter().try_fold(Rational::zero(), |acc, c| {
        Some(acc + c.exact.clone()? * int(c.multiplicity))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn third_has_equal_gaps() {
        let r = orbit_gaps(&RotationNumber::rational(rat(1, 3)), 3, PrecisionPolicy::default()).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.classes[0].exact, Some(rat(1, 3)));
        assert_eq!(r.classes[0].multiplicity, 3);
    }

    #[test]
    fn rational_with_repeats() {
        let r = orbit_gaps(&RotationNumber::rational(rat(2, 5)), 7, PrecisionPolicy::default()).unwrap();
        assert_eq!(exact_total(&r), Some(rat(1, 1)));
        assert_eq!(r.classes.iter().map(|c| c.multiplicity).sum::<u64>(), 7);
        assert_eq!(r.classes[0].exact, Some(rat(0, 1)));
    }

    #[test]
    fn golden_five_points() {
        let r = orbit_gaps(&RotationNumber::golden(), 5, PrecisionPolicy::default()).unwrap();
        assert_eq!(r.distinct(), 2);
        assert!((r.classes[0].length.mid_f64() - 0.145_898_033_750_315_4).abs() < 1e-12);
        assert_eq!(r.classes[0].multiplicity, 2);
        assert!((r.classes[1].length.mid_f64() - 0.236_067_977_499_789_8).abs() < 1e-12);
        assert_eq!(r.classes[1].multiplicity, 3);
        assert!(total_length(&r).contains_f64(1.0));
    }

    #[test]
    fn golden_many_points() {
        let r = orbit_gaps(&RotationNumber::golden(), 10_000, PrecisionPolicy::default()).unwrap();
        assert!(r.distinct() <= 3);
        assert!(r.max_gap.hi().to_f64() <= 3e-4);
        if r.distinct() == 3 {
            assert_eq!(r.largest_is_sum, Some(true));
        }
    }
}
