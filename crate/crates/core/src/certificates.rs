//! Diophantine certificates, Liouville witnesses and the tower construction
//! `x(m) = sum 1/q_j`, `q_1 = m`, `q_{j+1} = q_j^{q_j}`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::transcendental::{log2_bigint, log2_rational};
use crate::arith::{
    as_string, Dyadic, Interval, LogMagnitude, PrecisionPolicy, Rational, DEFAULT_PRECISION,
};
use crate::contfrac::{convergents_beyond, distance_log, Convergent};
use crate::error::{Error, Result};
use crate::rotation::number::{Truncation, DEFAULT_BIT_BUDGET};
use crate::rotation::{LinearForm, LiouvilleNumber, RotationNumber};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Justification {
    /// Periodic expansion: every complete quotient beyond the horizon is
    /// bounded by an exactly computed surd.
    PeriodicCf,
    /// Partial quotients bounded by a stated constant.
    BoundedQuotients,
    /// Nothing beyond the horizon is proved.
    AssertedByUser,
}

/// Claims `|x - p/q| >= c / q^{1 + delta}` for every rational `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiophantineCertificate {
    #[serde(with = "as_string")]
    pub c: Rational,
    #[serde(with = "as_string")]
    pub delta: Rational,
    #[serde(with = "as_string")]
    pub verified_up_to_q: BigInt,
    pub justification: Justification,
}

impl DiophantineCertificate {
    pub fn claim(c: Rational, delta: Rational) -> Self {
        DiophantineCertificate {
            c,
            delta,
            verified_up_to_q: BigInt::zero(),
            justification: Justification::AssertedByUser,
        }
    }
}

/// Approximants with `|x - p_j/q_j| <= alpha^{q_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiouvilleWitness {
    #[serde(with = "as_string")]
    pub alpha: Rational,
    pub approximants: Vec<Convergent>,
}

/// An integer that is either held exactly or only through its `log2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tier", content = "value", rename_all = "snake_case")]
pub enum BigValue {
    #[serde(with = "as_string")]
    Exact(BigInt),
    Log(LogMagnitude),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiouvilleConstruction {
    pub m: u64,
    pub depth: usize,
    /// `q_1 .. q_J` followed by `q_{J+1}`.
    pub q_sequence: Vec<BigValue>,
    #[serde(with = "as_string::vec")]
    pub partial_sums: Vec<Rational>,
    pub truncation: Option<Truncation>,
}

pub fn construct_liouville(
    m: u64,
    depth: Option<usize>,
) -> Result<(RotationNumber, LiouvilleWitness, LiouvilleConstruction)> {
    construct_liouville_with_budget(m, depth, DEFAULT_BIT_BUDGET)
}

pub fn construct_liouville_with_budget(
    m: u64,
    depth: Option<usize>,
    bit_budget: u64,
) -> Result<(RotationNumber, LiouvilleWitness, LiouvilleConstruction)> {
    let l = LiouvilleNumber::with_budget(m, depth, bit_budget)?;
    let witness = default_witness(&l);
    let mut q_sequence: Vec<BigValue> = l.q().iter().cloned().map(BigValue::Exact).collect();
    q_sequence.push(match l.next_q() {
        Some(q) => BigValue::Exact(q.clone()),
        None => BigValue::Log(LogMagnitude::from_log2(&l.log2_q()[l.depth()])),
    });
    let record = LiouvilleConstruction {
        m,
        depth: l.depth(),
        q_sequence,
        partial_sums: l.partial_sums().to_vec(),
        truncation: l.truncation(bit_budget),
    };
    Ok((RotationNumber::Liouville(l.into()), witness, record))
}

/// `alpha = 1/m` with the partial sums `j >= 2` as approximants.
///
/// The first partial sum `1/m` misses by `1/m^m + ...`, which always exceeds
/// `(1/m)^m`; the bound `2/q_{j+1} <= (1/m)^{q_j}` only starts at `j = 2`.
pub fn default_witness(l: &LiouvilleNumber) -> LiouvilleWitness {
    LiouvilleWitness {
        alpha: Rational::new(BigInt::one(), BigInt::from(l.m())),
        approximants: l
            .partial_sums()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, s)| Convergent {
                p: s.numer().clone(),
                q: s.denom().clone(),
                index: i + 1,
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    PrecisionFailure { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximantCheck {
    pub index: usize,
    #[serde(with = "as_string")]
    pub q: BigInt,
    /// `|x - p/q|`.
    pub distance: Option<LogMagnitude>,
    /// `alpha^q`.
    pub allowance: LogMagnitude,
    #[serde(flatten)]
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub checks: Vec<ApproximantCheck>,
    pub passed: bool,
    pub failing: Vec<usize>,
    pub precision_failures: Vec<usize>,
}

/// `|x - p/q|` in log form, refined until it can be compared.
fn gap_log(x: &RotationNumber, c: &Convergent, prec: u32) -> Result<LogMagnitude> {
    let f = LinearForm::of(x).sub(&LinearForm::constant(c.value()));
    let v = f.abs_value(prec)?;
    if v.is_zero() {
        return Ok(LogMagnitude::zero());
    }
    v.to_log(prec)
}

pub fn verify_liouville_witness(
    x: &RotationNumber,
    w: &LiouvilleWitness,
    policy: PrecisionPolicy,
) -> Result<WitnessReport> {
    if !(w.alpha.is_positive() && w.alpha < Rational::one()) {
        return Err(Error::domain("witness alpha must lie in (0, 1)"));
    }
    let checks: Vec<ApproximantCheck> = w
        .approximants
        .par_iter()
        .map(|c| check_approximant(x, &w.alpha, c, policy))
        .collect::<Result<_>>()?;
    let failing: Vec<usize> = checks
        .iter()
        .filter(|c| c.status == CheckStatus::Fail)
        .map(|c| c.index)
        .collect();
    let precision_failures: Vec<usize> = checks
        .iter()
        .filter(|c| matches!(c.status, CheckStatus::PrecisionFailure { .. }))
        .map(|c| c.index)
        .collect();
    Ok(WitnessReport {
        passed: failing.is_empty() && precision_failures.is_empty(),
        checks,
        failing,
        precision_failures,
    })
}

/// Bits allowed for the exact rational `alpha^q`.
const EXACT_ALLOWANCE_BITS: u64 = 1 << 20;

/// Decides `|x - p/q| <= alpha^q` through the signs of `x - p/q -+ alpha^q`
/// when `alpha^q` is a manageable rational. Catches the cases where both
/// sides agree far beyond any working precision.
fn exact_comparison(
    x: &RotationNumber,
    alpha: &Rational,
    c: &Convergent,
    prec: u32,
) -> Option<CheckStatus> {
    let q = c.q.to_u64()?;
    let bits = alpha.numer().bits().max(alpha.denom().bits());
    if q.checked_mul(bits)? > EXACT_ALLOWANCE_BITS {
        return None;
    }
    let a = Rational::new(alpha.numer().pow(q as u32), alpha.denom().pow(q as u32));
    let f = LinearForm::of(x).sub(&LinearForm::constant(c.value()));
    let above = f.add_rational(&-a.clone()).sign(prec)?;
    let below = f.add_rational(&a).sign(prec)?;
    Some(if above == Ordering::Greater || below == Ordering::Less {
        CheckStatus::Fail
    } else {
        CheckStatus::Pass
    })
}

fn check_approximant(
    x: &RotationNumber,
    alpha: &Rational,
    c: &Convergent,
    policy: PrecisionPolicy,
) -> Result<ApproximantCheck> {
    if !c.q.is_positive() {
        return Err(Error::domain("approximant denominators must be positive"));
    }
    if let Some(status) = exact_comparison(x, alpha, c, policy.start) {
        let prec = policy.start;
        return Ok(ApproximantCheck {
            index: c.index,
            q: c.q.clone(),
            distance: gap_log(x, c, prec).ok(),
            allowance: LogMagnitude::from_log2(&log2_rational(alpha, prec)?.mul_int(&c.q)),
            status,
        });
    }
    let mut last = None;
    let mut allowance = None;
    for prec in policy.schedule() {
        let rhs = LogMagnitude::from_log2(&log2_rational(alpha, prec)?.mul_int(&c.q));
        let lhs = match gap_log(x, c, prec) {
            Ok(l) => l,
            Err(e) if e.is_precision_failure() => {
                last = Some(e.to_string());
                allowance = Some(rhs);
                continue;
            }
            Err(e) => return Err(e),
        };
        let status = match lhs.certainly_le(&rhs) {
            Some(true) => CheckStatus::Pass,
            Some(false) => CheckStatus::Fail,
            None if matches!(x, RotationNumber::Ball(_)) => CheckStatus::PrecisionFailure {
                reason: "ball too wide to compare".into(),
            },
            None => {
                last = Some(format!("comparison unresolved at {prec} bits"));
                allowance = Some(rhs);
                continue;
            }
        };
        return Ok(ApproximantCheck {
            index: c.index,
            q: c.q.clone(),
            distance: Some(lhs),
            allowance: rhs,
            status,
        });
    }
    Ok(ApproximantCheck {
        index: c.index,
        q: c.q.clone(),
        distance: None,
        allowance: allowance.expect("schedule is non-empty"),
        status: CheckStatus::PrecisionFailure {
            reason: last.unwrap_or_default(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentCheck {
    pub convergent: Convergent,
    /// `q^delta * ||q x||`; the claim needs it `>= c`.
    pub scaled_distance: LogMagnitude,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub passed: bool,
    pub certificate: DiophantineCertificate,
    pub checks: Vec<ConvergentCheck>,
    pub first_violation: Option<ConvergentCheck>,
    /// Convergent with the smallest `q^delta ||q x||`.
    pub tightest: Option<ConvergentCheck>,
    /// Upper bound on complete quotients beyond the horizon, when known.
    pub quotient_bound: Option<Interval>,
}

/// Checks the claim on all convergents with `q <= horizon`. For `q_k <= q <
/// q_{k+1}` best approximation gives `q |q x - p| >= q_k ||q_k x||`, so the
/// convergents cover every denominator up to the horizon.
pub fn verify_diophantine(
    x: &RotationNumber,
    cert: &DiophantineCertificate,
    horizon: &BigInt,
) -> Result<DiophantineReport> {
    if x.is_rational() {
        return Err(Error::domain(
            "rationals are never Diophantine under this definition",
        ));
    }
    if !cert.c.is_positive() || cert.delta < Rational::one() {
        return Err(Error::domain("certificate needs c > 0 and delta >= 1"));
    }
    let prec = DEFAULT_PRECISION;
    let conv = convergents_beyond(x, horizon)?;
    let log_c = LogMagnitude::from_rational(&cert.c, prec)?;
    let dm1 = &cert.delta - Rational::one();
    let checks: Vec<ConvergentCheck> = conv
        .par_iter()
        .filter(|c| &c.q <= horizon && c.q.is_positive())
        .map(|c| -> Result<ConvergentCheck> {
            let d = distance_log(x, &c.q, prec)?;
            let lq = log2_bigint(&c.q, prec)?;
            let factor = LogMagnitude::from_log2(&lq.mul_rational(&(&dm1 + Rational::one())));
            let scaled = d.mul(&factor);
            let passed = match scaled.certainly_le(&log_c) {
                Some(true) if scaled != log_c => false,
                _ => log_c.certainly_le(&scaled) == Some(true),
            };
            Ok(ConvergentCheck {
                convergent: c.clone(),
                scaled_distance: scaled,
                passed,
            })
        })
        .collect::<Result<_>>()?;
    // Repeated denominators (q_0 = q_1 = 1) are the same check.
    let first_violation = checks.iter().find(|c| !c.passed).cloned();
    let tightest = checks
        .iter()
        .min_by(|a, b| {
            a.scaled_distance
                .log2_lo()
                .cmp(&b.scaled_distance.log2_lo())
        })
        .cloned();
    let (justification, quotient_bound) = justify(x, cert, &conv, horizon);
    let passed = first_violation.is_none();
    Ok(DiophantineReport {
        passed,
        certificate: DiophantineCertificate {
            c: cert.c.clone(),
            delta: cert.delta.clone(),
            verified_up_to_q: if passed { horizon.clone() } else { BigInt::zero() },
            justification: if passed {
                justification
            } else {
                Justification::AssertedByUser
            },
        },
        checks,
        first_violation,
        tightest,
        quotient_bound,
    })
}

/// Beyond the horizon: `q_k ||q_k x|| > 1 / (alpha_{k+1} + 1)`.
fn justify(
    x: &RotationNumber,
    cert: &DiophantineCertificate,
    conv: &[Convergent],
    horizon: &BigInt,
) -> (Justification, Option<Interval>) {
    let RotationNumber::Surd(s) = x else {
        return (Justification::AssertedByUser, None);
    };
    let last = conv
        .iter()
        .filter(|c| &c.q <= horizon)
        .map(|c| c.index)
        .max()
        .unwrap_or(0);
    let e = s.expansion();
    let prec = DEFAULT_PRECISION;
    let sup = e.complete_quotient_sup(last + 2, prec);
    let bound = Interval::point(sup, prec);
    let need = bound
        .add(&Interval::from_int(1, prec))
        .mul_rational(&cert.c);
    let j = if need.hi() <= &Dyadic::one() {
        Justification::PeriodicCf
    } else {
        Justification::AssertedByUser
    };
    (j, Some(bound))
}

/// Largest `c` (on a `2^-24` grid) with `delta = 1` that the convergent scan
/// and the periodic tail both support. Only surds have a provable tail.
pub fn auto_certificate(x: &RotationNumber, horizon: &BigInt) -> Result<DiophantineCertificate> {
    let RotationNumber::Surd(s) = x else {
        return Err(Error::domain(
            "automatic Diophantine certificates need a quadratic surd",
        ));
    };
    let prec = DEFAULT_PRECISION;
    let conv = convergents_beyond(x, horizon)?;
    let mut lo: Option<Dyadic> = None;
    let mut last = 0;
    for c in conv.iter().filter(|c| &c.q <= horizon) {
        last = last.max(c.index);
        let d = distance_log(x, &c.q, prec)?.mul(&LogMagnitude::from_bigint(&c.q, prec)?);
        let v = d.to_interval(prec)?;
        lo = Some(lo.map_or(v.lo().clone(), |m| m.min(v.lo().clone())));
    }
    let sup = s.expansion().complete_quotient_sup(last + 2, prec);
    let tail = Interval::from_int(1, prec)
        .div(&Interval::point(sup.add(&Dyadic::one()), prec))?;
    let best = lo.map_or(tail.lo().clone(), |m| m.min(tail.lo().clone()));
    let scaled = best.shl(24).floor();
    if !scaled.is_positive() {
        return Err(Error::precision("no positive constant found"));
    }
    let c = Rational::new(scaled, BigInt::one() << 24usize);
    Ok(DiophantineCertificate::claim(c, Rational::one()))
}

/// `log2` of the tail bound `(1/m)^{q_j}` against `2 / q_{j+1}` for the
/// construction itself, without reference to any enclosure of `x`.
pub fn construction_chain(l: &LiouvilleNumber, j: usize) -> Result<(LogMagnitude, LogMagnitude)> {
    let prec = DEFAULT_PRECISION;
    let (_, upper) = l.tail_log2_bounds(j);
    let m = Rational::from_integer(BigInt::from(l.m()));
    let lq = log2_rational(&m, prec)?.mul_int(&l.q()[j - 1]).neg();
    Ok((LogMagnitude::from_log2(&upper), LogMagnitude::from_log2(&lq)))
}

pub fn q_as_u64(c: &Convergent) -> Option<u64> {
    c.q.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn construction_examples() {
        let (_, w, rec) = construct_liouville(2, Some(3)).unwrap();
        assert_eq!(rec.partial_sums, vec![rat(1, 2), rat(3, 4), rat(193, 256)]);
        assert_eq!(rec.q_sequence[2], BigValue::Exact(BigInt::from(256)));
        assert_eq!(w.alpha, rat(1, 2));
        let (_, _, rec) = construct_liouville(3, Some(2)).unwrap();
        assert_eq!(rec.partial_sums, vec![rat(1, 3), rat(10, 27)]);
        let (_, _, rec) = construct_liouville(2, Some(4)).unwrap();
        match &rec.q_sequence[3] {
            BigValue::Exact(q) => assert_eq!(q, &(BigInt::one() << 2048usize)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(rec.q_sequence[4], BigValue::Log(_)));
        let (_, _, rec) = construct_liouville(2, Some(9)).unwrap();
        assert_eq!(rec.truncation.as_ref().unwrap().depth, 4);
    }

    #[test]
    fn own_witness_passes() {
        let (x, w, _) = construct_liouville(2, None).unwrap();
        let r = verify_liouville_witness(&x, &w, PrecisionPolicy::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checks.iter().map(|c| c.index).collect::<Vec<_>>(), vec![2, 3, 4]);
    }

    #[test]
    fn first_partial_sum_misses_bound() {
        for m in 2..=5u64 {
            let l = LiouvilleNumber::new(m, None).unwrap();
            let x = RotationNumber::Liouville(l.clone().into());
            let w = LiouvilleWitness {
                alpha: rat(1, m as i64),
                approximants: vec![Convergent { p: 1.into(), q: m.into(), index: 1 }],
            };
            let r = verify_liouville_witness(&x, &w, PrecisionPolicy::default()).unwrap();
            assert_eq!(r.failing, vec![1], "m = {m}: {r:?}");
        }
    }

    #[test]
    fn golden_witness_fails_at_eight() {
        let w = LiouvilleWitness {
            alpha: rat(1, 2),
            approximants: vec![
                Convergent { p: 2.into(), q: 3.into(), index: 1 },
                Convergent { p: 5.into(), q: 8.into(), index: 2 },
            ],
        };
        let r = verify_liouville_witness(&RotationNumber::golden(), &w, PrecisionPolicy::default()).unwrap();
        assert_eq!(r.checks[0].status, CheckStatus::Pass);
        assert_eq!(r.checks[1].status, CheckStatus::Fail);
        assert_eq!(r.failing, vec![2]);
        let empty = LiouvilleWitness { alpha: rat(1, 2), approximants: vec![] };
        assert!(verify_liouville_witness(&RotationNumber::golden(), &empty, PrecisionPolicy::default()).unwrap().passed);
    }

    #[test]
    fn golden_diophantine() {
        let g = RotationNumber::golden();
        let q = BigInt::from(1_000_000);
        let ok = verify_diophantine(&g, &DiophantineCertificate::claim(rat(35, 100), rat(1, 1)), &q).unwrap();
        assert!(ok.passed);
        assert_eq!(ok.certificate.justification, Justification::PeriodicCf);
        assert_eq!(ok.tightest.unwrap().convergent.q, BigInt::one());
        let bad = verify_diophantine(&g, &DiophantineCertificate::claim(rat(40, 100), rat(1, 1)), &q).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.first_violation.unwrap().convergent.q, BigInt::one());
        let auto = auto_certificate(&g, &q).unwrap();
        assert!(auto.c > rat(38, 100) && auto.c < rat(382, 1000));
        assert!(verify_diophantine(&g, &auto, &q).unwrap().passed);
    }

    #[test]
    fn liouville_is_not_diophantine() {
        let x = RotationNumber::liouville(2, None).unwrap();
        let r = verify_diophantine(&x, &DiophantineCertificate::claim(rat(1, 1000), rat(1, 1)), &BigInt::from(256)).unwrap();
        assert!(!r.passed);
        assert_eq!(r.first_violation.unwrap().convergent.q, BigInt::from(256));
        assert!(verify_diophantine(&RotationNumber::rational(rat(1, 3)), &DiophantineCertificate::claim(rat(1, 10), rat(1, 1)), &BigInt::from(10)).is_err());
    }

    #[test]
    fn certificate_json_is_byte_stable() {
        let c = DiophantineCertificate {
            c: rat(7, 20),
            delta: rat(1, 1),
            verified_up_to_q: BigInt::from(1_000_000),
            justification: Justification::PeriodicCf,
        };
        let s = serde_json::to_string(&c).unwrap();
        let back: DiophantineCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
