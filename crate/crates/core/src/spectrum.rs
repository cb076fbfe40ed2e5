//! Membership of a point `lambda` in the spectrum of `f(z) -> f(r z)`.
//!
//! Points off the circle and points of a finite rotation are decided
//! structurally. On the circle the resolvent exists iff for every `alpha < 1`
//! some `beta in (alpha, 1)` keeps `sup_n (alpha/beta)^n / |r^n - lambda|`
//! finite; that supremum is computed up to a horizon and bounded beyond it by
//! a Diophantine certificate. Fast rational approximation forces `lambda = 1`
//! into the spectrum.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::transcendental::{exp2, ln2, log2_bigint, log2_rational};
use crate::arith::{
    as_string, frac, int, pi, unit_root_rational, Dyadic, Interval, LogMagnitude, Magnitude,
    PrecisionPolicy, Rational,
};
use crate::certificates::{
    auto_certificate, default_witness, verify_diophantine, verify_liouville_witness, CheckStatus,
    DiophantineCertificate, Justification, LiouvilleWitness,
};
use crate::error::{Error, Result};
use crate::rotation::number::{format_rational, parse_rational};
use crate::rotation::{CirclePoint, DivisorEngine, RotationNumber, SmallDivisor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceTag {
    /// Functions vanishing at 0; monomials `z^n`, `n >= 1`.
    H0,
    /// All analytic functions; monomials `z^n`, `n >= 0`.
    H,
}

impl SpaceTag {
    pub fn first_index(self) -> u64 {
        match self {
            SpaceTag::H0 => 1,
            SpaceTag::H => 0,
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceTag::H0 => "H0",
            SpaceTag::H => "H",
        })
    }
}

impl FromStr for SpaceTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H0" | "h0" => Ok(SpaceTag::H0),
            "H" | "h" => Ok(SpaceTag::H),
            other => Err(Error::Parse(format!("unknown space {other:?}, expected H0 or H"))),
        }
    }
}

/// The point being classified: on the circle by angle or orbit index, or an
/// arbitrary complex number with rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda {
    Circle(CirclePoint),
    Complex { re: Rational, im: Rational },
}

impl Lambda {
    pub fn one() -> Self {
        Lambda::Circle(CirclePoint::one())
    }

    pub fn angle(y: Rational) -> Self {
        Lambda::Circle(CirclePoint::Angle(RotationNumber::rational(y)))
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Circle(c) => write!(f, "{c}"),
            Lambda::Complex { re, im } => {
                write!(f, "complex:{},{}", format_rational(re), format_rational(im))
            }
        }
    }
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("complex:") {
            let (re, im) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected complex:re,im, got {s:?}")))?;
            return Ok(Lambda::Complex {
                re: parse_rational(re)?,
                im: parse_rational(im)?,
            });
        }
        Ok(Lambda::Circle(s.parse()?))
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum BetaRule {
    /// `beta = (1 + alpha) / 2`.
    Midpoint,
    #[serde(with = "as_string")]
    Fixed(Rational),
}

impl BetaRule {
    pub fn beta(&self, alpha: &Rational) -> Result<Rational> {
        let b = match self {
            BetaRule::Midpoint => (Rational::one() + alpha) / int(2),
            BetaRule::Fixed(b) => b.clone(),
        };
        if !(alpha.is_positive() && &b > alpha && b < Rational::one()) {
            return Err(Error::domain(format!(
                "need 0 < alpha < beta < 1, got alpha = {alpha}, beta = {b}"
            )));
        }
        Ok(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailStrategy {
    DiophantineBound,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionConfig {
    #[serde(with = "as_string::vec")]
    pub alpha_grid: Vec<Rational>,
    pub beta_rule: BetaRule,
    /// Terms `n <= horizon` are evaluated one by one.
    pub horizon: u64,
    pub tail_strategy: TailStrategy,
    /// Denominator bound for verifying Diophantine certificates.
    #[serde(with = "as_string")]
    pub certificate_horizon: BigInt,
    /// A single term above `2^threshold_log2` is reported as a blow-up.
    pub threshold_log2: i64,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        CriterionConfig {
            alpha_grid: vec![
                Rational::new(1.into(), 4.into()),
                Rational::new(1.into(), 2.into()),
                Rational::new(3.into(), 4.into()),
                Rational::new(9.into(), 10.into()),
            ],
            beta_rule: BetaRule::Midpoint,
            horizon: 10_000,
            tail_strategy: TailStrategy::DiophantineBound,
            certificate_horizon: BigInt::from(1_000_000),
            threshold_log2: 64,
        }
    }
}

impl CriterionConfig {
    pub fn single(alpha: Rational, beta: Rational) -> Self {
        CriterionConfig {
            alpha_grid: vec![alpha],
            beta_rule: BetaRule::Fixed(beta),
            ..Default::default()
        }
    }
}

/// Certificates supplied by the caller.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub diophantine: Option<DiophantineCertificate>,
    pub witness: Option<LiouvilleWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSource {
    /// `|r^n - e^{2 pi i a/b}| >= 4 c / (b^{1+delta} n^delta)`.
    Diophantine,
    /// Finite rotation: every later term is `(alpha/beta)^n` over the least gap.
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    Bounded { bound: Interval, source: TailSource },
    Unknown { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Overall {
    /// The supremum over all `n` is at most `c`.
    Bounded { c: Interval },
    UnboundedWitness { n: u64, value: LogMagnitude },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    #[serde(with = "as_string")]
    pub alpha: Rational,
    #[serde(with = "as_string")]
    pub beta: Rational,
    /// `max_{n <= N} (alpha/beta)^n / |r^n - lambda|`.
    pub finite_sup: Interval,
    pub sup_argmax: u64,
    pub tail: Tail,
    pub overall: Overall,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub horizon: u64,
    /// The verified certificate behind a Diophantine tail, if any.
    pub certificate: Option<DiophantineCertificate>,
    pub results: Vec<CriterionResult>,
}

impl CriterionReport {
    pub fn all_bounded(&self) -> bool {
        self.results
            .iter()
            .all(|r| matches!(r.overall, Overall::Bounded { .. }))
    }

    pub fn max_finite_sup(&self) -> Option<Interval> {
        self.results
            .iter()
            .map(|r| r.finite_sup.clone())
            .reduce(|a, b| a.max(&b))
    }
}

/// The rational angle of `lambda`, when it has one.
fn rational_angle(x: &RotationNumber, y: &CirclePoint) -> Option<Rational> {
    match y {
        CirclePoint::Angle(RotationNumber::Rational(r)) => Some(frac(r)),
        CirclePoint::Orbit(0) => Some(Rational::zero()),
        CirclePoint::Orbit(k) => x.as_rational().map(|r| frac(&(r * int(*k)))),
        _ => None,
    }
}

fn divisor_table(
    x: &RotationNumber,
    y: &CirclePoint,
    horizon: u64,
    policy: PrecisionPolicy,
) -> Result<Vec<SmallDivisor>> {
    let engine = DivisorEngine::new(x, y, policy);
    // a finite rotation repeats its divisors with the period of x
    let period = match (x.as_rational(), y.form(x).as_exact()) {
        (Some(r), Some(_)) => r.denom().to_u64().filter(|&m| m < horizon),
        _ => None,
    };
    let table: Vec<SmallDivisor> = match period {
        Some(m) => {
            let first: Vec<SmallDivisor> = engine.table(1, m).into_iter().collect::<Result<_>>()?;
            (1..=horizon)
                .map(|n| SmallDivisor {
                    n,
                    ..first[((n - 1) % m) as usize].clone()
                })
                .collect()
        }
        None => engine.table(1, horizon).into_iter().collect::<Result<_>>()?,
    };
    if let Some(d) = table.iter().find(|d| d.eigen) {
        return Err(Error::EigenCollision { n: d.n });
    }
    Ok(table)
}

/// `log2 |r^n - lambda|` enclosures.
/// `rho^n / |r^n - lambda|`, on the linear scale unless the divisor is tiny.
enum Term {
    Linear(Interval),
    /// `log2` of the term.
    Log(Interval),
}

impl Term {
    fn exceeds(&self, bits: i64) -> bool {
        match self {
            Term::Linear(i) => i.lo() > &Dyadic::pow2(bits),
            Term::Log(l) => l.lo() > &Dyadic::from_int(bits),
        }
    }

    fn to_log(&self) -> Result<LogMagnitude> {
        match self {
            Term::Linear(i) => LogMagnitude::from_interval(i),
            Term::Log(l) => Ok(LogMagnitude::from_log2(l)),
        }
    }

    fn to_interval(&self) -> Result<Interval> {
        match self {
            Term::Linear(i) => Ok(i.clone()),
            Term::Log(l) => exp2(l),
        }
    }
}

fn criterion_terms(table: &[SmallDivisor], rho: &Rational, log_rho: &Interval, prec: u32) -> Result<Vec<Term>> {
    let r = Interval::from_rational(rho, prec);
    let mut pow = Interval::from_int(1, prec);
    table
        .iter()
        .map(|d| {
            pow = pow.mul(&r);
            Ok(match &d.divisor {
                Magnitude::Log(l) => Term::Log(
                    log_rho
                        .mul_int(&BigInt::from(d.n))
                        .sub(&l.log2(prec).expect("divisors are non-zero")),
                ),
                m => Term::Linear(pow.div(&m.to_interval(prec)?)?),
            })
        })
        .collect()
}

/// Supremum and argmax of the terms.
fn finite_sup(terms: &[Term]) -> Result<(Interval, u64)> {
    let values: Vec<Interval> = terms.iter().map(Term::to_interval).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.lo().cmp(b.1.lo()))
        .map(|(i, _)| i)
        .expect("horizon is at least 1");
    let sup = values
        .iter()
        .cloned()
        .reduce(|a, b| a.max(&b))
        .expect("horizon is at least 1");
    Ok((sup, best as u64 + 1))
}

/// `log2` of `sup_{n > N} n^delta rho^n`, certified by monotonicity past the
/// peak at `delta / ln(1/rho)`, or by the global maximum otherwise.
fn log_tail_of_power(delta: &Rational, log_rho: &Interval, horizon: u64, prec: u32) -> Result<Interval> {
    let n1 = BigInt::from(horizon + 1);
    let ln_inv_rho = log_rho.neg().mul(&ln2(prec));
    let start = ln_inv_rho.mul_int(&n1);
    let d = Interval::from_rational(delta, prec);
    if d.certainly_lt(&start) == Some(true) {
        return Ok(log2_bigint(&n1, prec)?.mul_rational(delta).add(&log_rho.mul_int(&n1)));
    }
    // (delta / (e ln(1/rho)))^delta
    let log2e = Interval::from_int(1, prec).div(&ln2(prec))?;
    let inner = log2_rational(delta, prec)?
        .sub(&crate::arith::transcendental::log2_interval(&ln_inv_rho)?)
        .sub(&log2e);
    Ok(inner.mul_rational(delta))
}

/// The verified Diophantine certificate usable for `lambda`, if any.
fn usable_certificate(
    x: &RotationNumber,
    y: &CirclePoint,
    cfg: &CriterionConfig,
    certs: &Certificates,
) -> Result<Option<(DiophantineCertificate, BigInt)>> {
    if cfg.tail_strategy == TailStrategy::None || x.is_rational() {
        return Ok(None);
    }
    let Some(b) = rational_angle(x, y).map(|r| r.denom().clone()) else {
        return Ok(None);
    };
    let Some(cert) = &certs.diophantine else {
        return Ok(None);
    };
    let report = verify_diophantine(x, cert, &cfg.certificate_horizon)?;
    if !report.passed || report.certificate.justification == Justification::AssertedByUser {
        return Ok(None);
    }
    Ok(Some((report.certificate, b)))
}

/// Least `|r^n - lambda|` over one period of a finite rotation.
fn period_gap(x: &Rational, y: &CirclePoint, policy: PrecisionPolicy) -> Result<(Magnitude, u64)> {
    let m = x
        .denom()
        .to_u64()
        .filter(|&m| m <= 1_000_000)
        .ok_or_else(|| Error::domain("period too long to scan"))?;
    let table = divisor_table(&RotationNumber::rational(x.clone()), y, m, policy)?;
    let prec = policy.start;
    let mut best: Option<&SmallDivisor> = None;
    for d in &table {
        best = match best {
            None => Some(d),
            Some(b) => {
                let (lb, ld) = (b.divisor.to_interval(prec)?, d.divisor.to_interval(prec)?);
                if ld.lo() < lb.lo() {
                    Some(d)
                } else {
                    Some(b)
                }
            }
        };
    }
    let b = best.expect("period is at least 1");
    Ok((b.divisor.clone(), b.n))
}

/// Evaluates `sup_n (alpha/beta)^n / |r^n - lambda|` for each grid point.
pub fn criterion_check(
    x: &RotationNumber,
    lambda: &CirclePoint,
    cfg: &CriterionConfig,
    certs: &Certificates,
    policy: PrecisionPolicy,
) -> Result<CriterionReport> {
    if cfg.horizon == 0 {
        return Err(Error::domain("criterion horizon must be positive"));
    }
    let prec = policy.start;
    let table = divisor_table(x, lambda, cfg.horizon, policy)?;
    let cert = usable_certificate(x, lambda, cfg, certs)?;
    let periodic = match x.as_rational() {
        Some(r) => Some(period_gap(r, lambda, policy)?),
        None => None,
    };
    let mut results = Vec::with_capacity(cfg.alpha_grid.len());
    for alpha in &cfg.alpha_grid {
        let beta = cfg.beta_rule.beta(alpha)?;
        let rho = alpha / &beta;
        let log_rho = log2_rational(&rho, prec)?;
        let terms = criterion_terms(&table, &rho, &log_rho, prec)?;
        let (sup, argmax) = finite_sup(&terms)?;
        let blowup = terms.iter().position(|t| t.exceeds(cfg.threshold_log2));
        let tail = if let Some((c, b)) = &cert {
            // n^delta b^{1+delta} rho^n / (4c)
            let l = log_tail_of_power(&c.delta, &log_rho, cfg.horizon, prec)?
                .add(&log2_bigint(b, prec)?.mul_rational(&(&c.delta + Rational::one())))
                .sub(&log2_rational(&(&c.c * int(4)), prec)?);
            Tail::Bounded {
                bound: exp2(&l)?,
                source: TailSource::Diophantine,
            }
        } else if let Some((gap, _)) = &periodic {
            let l = log_rho
                .mul_int(&BigInt::from(cfg.horizon + 1))
                .sub(&gap.to_log(prec)?.log2(prec).expect("positive gap"));
            Tail::Bounded {
                bound: exp2(&l)?,
                source: TailSource::Periodic,
            }
        } else {
            Tail::Unknown {
                reason: match x {
                    RotationNumber::Liouville(_) => "no Diophantine bound exists for this angle".into(),
                    _ if rational_angle(x, lambda).is_none() => {
                        "lambda has no rational relation to r".into()
                    }
                    _ => "no verified Diophantine certificate".into(),
                },
            }
        };
        let overall = if let Some(i) = blowup {
            Overall::UnboundedWitness {
                n: i as u64 + 1,
                value: terms[i].to_log()?,
            }
        } else if let Tail::Bounded { bound, .. } = &tail {
            Overall::Bounded { c: sup.max(bound) }
        } else {
            Overall::Inconclusive
        };
        results.push(CriterionResult {
            alpha: alpha.clone(),
            beta,
            finite_sup: sup,
            sup_argmax: argmax,
            tail,
            overall,
        });
    }
    Ok(CriterionReport {
        horizon: cfg.horizon,
        certificate: cert.map(|c| c.0),
        results,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigenvalue {
    /// `r^n`; the eigenvectors are the monomials listed in `monomials`.
    pub n: u64,
    /// `n x mod 1`.
    pub angle: Interval,
    #[serde(with = "as_string::option")]
    pub exact_angle: Option<Rational>,
    pub monomials: String,
    pub kernel: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpectrum {
    pub space: SpaceTag,
    /// All eigenvalues are listed.
    pub complete: bool,
    pub eigenvalues: Vec<Eigenvalue>,
}

pub fn point_spectrum(x: &RotationNumber, space: SpaceTag, count: u64) -> PointSpectrum {
    let prec = crate::arith::DEFAULT_PRECISION;
    if let Some(r) = x.as_rational() {
        let m = r.denom().clone();
        let limit = m.to_u64().unwrap_or(u64::MAX).min(count.max(1));
        let eigenvalues = (0..limit)
            .map(|j| {
                let t = frac(&(r * int(j)));
                let monomials = match (j, space) {
                    (0, SpaceTag::H0) => format!("z^({m} k), k >= 1"),
                    _ => format!("z^({j} + {m} k), k >= 0"),
                };
                Eigenvalue {
                    n: j,
                    angle: Interval::from_rational(&t, prec),
                    exact_angle: Some(t),
                    monomials,
                    kernel: "infinite-dimensional".into(),
                }
            })
            .collect();
        return PointSpectrum {
            space,
            complete: BigInt::from(limit) == m,
            eigenvalues,
        };
    }
    let start = space.first_index();
    let eigenvalues = (start..start + count)
        .map(|n| {
            let v = x.enclose(prec + 64).mul_int(&BigInt::from(n));
            let f = v.lo().floor();
            Eigenvalue {
                n,
                angle: v.sub(&Interval::from_int(f, prec + 64)).with_precision(prec),
                exact_angle: None,
                monomials: format!("z^{n}"),
                kernel: "one-dimensional".into(),
            }
        })
        .collect();
    PointSpectrum {
        space,
        complete: false,
        eigenvalues,
    }
}

/// One step of the contradiction scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthStep {
    pub j: usize,
    #[serde(with = "as_string")]
    pub q: BigInt,
    /// `(beta/alpha)^q / (2 pi q)`.
    pub growth: LogMagnitude,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContradictionScan {
    #[serde(with = "as_string")]
    pub alpha: Rational,
    #[serde(with = "as_string")]
    pub beta: Rational,
    pub steps: Vec<GrowthStep>,
    /// Increasing and the last value exceeds `2^64`.
    pub diverges: bool,
    /// First step above `2^64`.
    pub first_above: Option<usize>,
}

pub const GROWTH_THRESHOLD_LOG2: i64 = 64;

/// Growth of `(beta/alpha)^{q_j} / (2 pi q_j)`, which a bounded resolvent
/// would keep below a fixed constant.
pub fn liouville_contradiction_scan(w: &LiouvilleWitness, beta: &Rational) -> Result<ContradictionScan> {
    if !(beta > &w.alpha && beta < &Rational::one()) {
        return Err(Error::domain(format!(
            "need alpha < beta < 1, got alpha = {}, beta = {beta}",
            w.alpha
        )));
    }
    let prec = crate::arith::DEFAULT_PRECISION;
    let l_ratio = log2_rational(&(beta / &w.alpha), prec)?;
    let l_2pi = crate::arith::transcendental::log2_interval(&pi(prec + 16).shl(1))?;
    let steps: Vec<GrowthStep> = w
        .approximants
        .iter()
        .map(|c| -> Result<GrowthStep> {
            let l = l_ratio
                .mul_int(&c.q)
                .sub(&l_2pi)
                .sub(&log2_bigint(&c.q, prec)?);
            Ok(GrowthStep {
                j: c.index,
                q: c.q.clone(),
                growth: LogMagnitude::from_log2(&l),
            })
        })
        .collect::<Result<_>>()?;
    let increasing = steps
        .windows(2)
        .all(|s| s[0].growth.certainly_lt(&s[1].growth) == Some(true));
    let above = |s: &GrowthStep| s.growth.exceeds_pow2(GROWTH_THRESHOLD_LOG2);
    Ok(ContradictionScan {
        alpha: w.alpha.clone(),
        beta: beta.clone(),
        diverges: increasing && steps.last().is_some_and(above),
        first_above: steps.iter().find(|s| above(s)).map(|s| s.j),
        steps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InEvidence {
    LiouvilleContradiction {
        j: usize,
        #[serde(with = "as_string")]
        q: BigInt,
        growth: LogMagnitude,
        /// Witness indices certified by the verifier.
        verified: Vec<usize>,
        scan: ContradictionScan,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotInEvidence {
    /// `|r^n - lambda| >= delta` for every `n`.
    OffCircleResolvent { delta: Interval },
    RootOfUnityGap {
        min_gap: Interval,
        exact: Magnitude,
        argmin: u64,
        period: u64,
    },
    DiophantineTailBound {
        cert: DiophantineCertificate,
        horizon_sup: Interval,
        tail_bound: Interval,
        grid: Vec<CriterionResult>,
        /// The grid is finite; the tail argument works for every `alpha`.
        coverage: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "evidence")]
pub enum SpectralVerdict {
    Eigenvalue {
        n: u64,
        eigenvector_note: String,
    },
    InSpectrum(InEvidence),
    NotInSpectrum(NotInEvidence),
    Undetermined {
        finite_horizon_sup: Option<Interval>,
        #[serde(rename = "N")]
        n: u64,
        reason: String,
        precision_failure: bool,
    },
}

impl SpectralVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralVerdict::Eigenvalue { .. } => "Eigenvalue",
            SpectralVerdict::InSpectrum(_) => "InSpectrum",
            SpectralVerdict::NotInSpectrum(_) => "NotInSpectrum",
            SpectralVerdict::Undetermined { .. } => "Undetermined",
        }
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, SpectralVerdict::Undetermined { .. })
    }

    pub fn in_spectrum(&self) -> Option<bool> {
        match self {
            SpectralVerdict::Eigenvalue { .. } | SpectralVerdict::InSpectrum(_) => Some(true),
            SpectralVerdict::NotInSpectrum(_) => Some(false),
            SpectralVerdict::Undetermined { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictInput {
    pub x: RotationNumber,
    pub lambda: Lambda,
    pub space: SpaceTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub input: VerdictInput,
    #[serde(flatten)]
    pub verdict: SpectralVerdict,
    pub horizon: u64,
    pub precision_bits: u32,
    pub runtime_ms: Option<u64>,
}

fn eigen(n: u64, space: SpaceTag) -> SpectralVerdict {
    let note = match (n, space) {
        (0, _) => "constant functions".to_string(),
        _ => format!("z^{n} is an eigenvector"),
    };
    SpectralVerdict::Eigenvalue {
        n,
        eigenvector_note: note,
    }
}

fn undetermined(reason: impl Into<String>, sup: Option<Interval>, n: u64) -> SpectralVerdict {
    SpectralVerdict::Undetermined {
        finite_horizon_sup: sup,
        n,
        reason: reason.into(),
        precision_failure: false,
    }
}

fn from_error(e: Error, n: u64, space: SpaceTag) -> Result<SpectralVerdict> {
    match e {
        Error::EigenCollision { n: k } => Ok(eigen(k, space)),
        Error::InsufficientPrecision(m) => Ok(SpectralVerdict::Undetermined {
            finite_horizon_sup: None,
            n,
            reason: m,
            precision_failure: true,
        }),
        other => Err(other),
    }
}

/// The circle point for a complex `lambda` with `|lambda| = 1`, when its
/// angle is a rational number of turns.
fn circle_from_complex(re: &Rational, im: &Rational) -> Option<CirclePoint> {
    (0..4).find_map(|k| {
        let t = Rational::new(k.into(), 4.into());
        let (c, s) = unit_root_rational(&t)?;
        (&c == re && &s == im).then(|| CirclePoint::Angle(RotationNumber::rational(t)))
    })
}

pub fn classify(
    x: &RotationNumber,
    lambda: &Lambda,
    space: SpaceTag,
    cfg: &CriterionConfig,
    certs: &Certificates,
    policy: PrecisionPolicy,
) -> Result<VerdictReport> {
    let verdict = match classify_verdict(x, lambda, space, cfg, certs, policy) {
        Ok(v) => v,
        Err(e) => from_error(e, cfg.horizon, space)?,
    };
    Ok(VerdictReport {
        input: VerdictInput {
            x: x.clone(),
            lambda: lambda.clone(),
            space,
        },
        verdict,
        horizon: cfg.horizon,
        precision_bits: policy.start,
        runtime_ms: None,
    })
}

fn classify_verdict(
    x: &RotationNumber,
    lambda: &Lambda,
    space: SpaceTag,
    cfg: &CriterionConfig,
    certs: &Certificates,
    policy: PrecisionPolicy,
) -> Result<SpectralVerdict> {
    let prec = policy.start;
    let y = match lambda {
        Lambda::Complex { re, im } => {
            let norm2 = re * re + im * im;
            if norm2 != Rational::one() {
                let abs = Interval::sqrt_rational(&norm2, prec)?;
                let delta = Interval::from_int(1, prec).sub(&abs).abs();
                return Ok(SpectralVerdict::NotInSpectrum(NotInEvidence::OffCircleResolvent {
                    delta,
                }));
            }
            match circle_from_complex(re, im) {
                Some(c) => c,
                None => {
                    return Ok(undetermined(
                        "lambda lies on the circle at an angle that is not a rational number of turns; give it as angle:<x>",
                        None,
                        cfg.horizon,
                    ))
                }
            }
        }
        Lambda::Circle(c) => c.clone(),
    };
    let ry = rational_angle(x, &y);
    let is_one = ry.as_ref().is_some_and(|r| r.is_zero());
    if space == SpaceTag::H && is_one {
        return Ok(eigen(0, space));
    }
    if let CirclePoint::Orbit(k) = y {
        if k >= space.first_index() {
            return Ok(eigen(k, space));
        }
    }

    if let Some(r) = x.as_rational() {
        let (gap, argmin) = period_gap(r, &y, policy)?;
        let period = r.denom().to_u64().expect("scanned period fits");
        return Ok(SpectralVerdict::NotInSpectrum(NotInEvidence::RootOfUnityGap {
            min_gap: gap.to_interval(prec)?,
            exact: gap,
            argmin,
            period,
        }));
    }

    if space == SpaceTag::H {
        return Ok(undetermined(
            "the criterion is only established for functions vanishing at 0",
            None,
            cfg.horizon,
        ));
    }

    if is_one {
        if let Some(v) = liouville_verdict(x, certs, cfg)? {
            return Ok(v);
        }
    }

    let mut certs = certs.clone();
    if certs.diophantine.is_none() && matches!(x, RotationNumber::Surd(_)) && ry.is_some() {
        certs.diophantine = Some(auto_certificate(x, &cfg.certificate_horizon)?);
    }
    let report = criterion_check(x, &y, cfg, &certs, policy)?;
    let sup = report.max_finite_sup();
    if let (true, Some(cert)) = (report.all_bounded(), &report.certificate) {
        let tail = report
            .results
            .iter()
            .filter_map(|r| match &r.tail {
                Tail::Bounded { bound, .. } => Some(bound.clone()),
                Tail::Unknown { .. } => None,
            })
            .reduce(|a, b| a.max(&b))
            .expect("all grid points have a bounded tail");
        return Ok(SpectralVerdict::NotInSpectrum(NotInEvidence::DiophantineTailBound {
            cert: cert.clone(),
            horizon_sup: sup.expect("grid is non-empty"),
            tail_bound: tail,
            grid: report.results,
            coverage: "criterion passed on grid + Diophantine tail".into(),
        }));
    }
    let reason = if ry.is_none() {
        "lambda has no rational relation to r; only density of the orbit is known".to_string()
    } else {
        report
            .results
            .iter()
            .find_map(|r| match (&r.overall, &r.tail) {
                (Overall::UnboundedWitness { n, .. }, _) => Some(format!(
                    "term n = {n} exceeds 2^{} but no divergent witness is certified",
                    cfg.threshold_log2
                )),
                (_, Tail::Unknown { reason }) => Some(reason.clone()),
                _ => None,
            })
            .unwrap_or_else(|| "criterion inconclusive".into())
    };
    Ok(undetermined(reason, sup, cfg.horizon))
}

/// Fast approximation forces `1` into the spectrum. Only constructed numbers
/// qualify: their approximants continue for every `j`, while a supplied list
/// is finite.
fn liouville_verdict(
    x: &RotationNumber,
    certs: &Certificates,
    cfg: &CriterionConfig,
) -> Result<Option<SpectralVerdict>> {
    let RotationNumber::Liouville(l) = x else {
        return Ok(None);
    };
    let own = default_witness(l);
    let w = match &certs.witness {
        // The construction bound holds for every alpha >= 1/m.
        Some(w) if w.alpha >= own.alpha => LiouvilleWitness {
            alpha: w.alpha.clone(),
            approximants: own.approximants.clone(),
        },
        Some(_) => return Ok(None),
        None => own,
    };
    let policy = PrecisionPolicy::default();
    let report = verify_liouville_witness(x, &w, policy)?;
    let verified: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.status == CheckStatus::Pass)
        .map(|c| c.index)
        .collect();
    let passing = LiouvilleWitness {
        alpha: w.alpha.clone(),
        approximants: w
            .approximants
            .iter()
            .filter(|c| verified.contains(&c.index))
            .cloned()
            .collect(),
    };
    let beta = match &cfg.beta_rule {
        BetaRule::Fixed(b) if b > &w.alpha => b.clone(),
        _ => (Rational::one() + &w.alpha) / int(2),
    };
    let scan = liouville_contradiction_scan(&passing, &beta)?;
    if !scan.diverges {
        return Ok(None);
    }
    let j = scan.first_above.expect("divergent scans pass the threshold");
    let step = scan.steps.iter().find(|s| s.j == j).expect("step exists").clone();
    Ok(Some(SpectralVerdict::InSpectrum(InEvidence::LiouvilleContradiction {
        j,
        q: step.q,
        growth: step.growth,
        verified,
        scan,
    })))
}

/// Re-derives the evidence of a decided verdict from scratch.
pub fn reverify(report: &VerdictReport) -> Result<bool> {
    let x = &report.input.x;
    let prec = report.precision_bits;
    match &report.verdict {
        SpectralVerdict::Undetermined { .. } => Ok(true),
        SpectralVerdict::Eigenvalue { n, .. } => {
            let Lambda::Circle(y) = &report.input.lambda else {
                return Ok(false);
            };
            if *n == 0 {
                return Ok(rational_angle(x, y).is_some_and(|r| r.is_zero()));
            }
            let d = crate::rotation::small_divisor(x, *n, y, PrecisionPolicy::with_start(prec))?;
            Ok(d.eigen)
        }
        SpectralVerdict::NotInSpectrum(NotInEvidence::OffCircleResolvent { delta }) => {
            let Lambda::Complex { re, im } = &report.input.lambda else {
                return Ok(false);
            };
            let abs = Interval::sqrt_rational(&(re * re + im * im), prec)?;
            Ok(delta.overlaps(&Interval::from_int(1, prec).sub(&abs).abs()) && delta.is_positive())
        }
        SpectralVerdict::NotInSpectrum(NotInEvidence::RootOfUnityGap { exact, period, .. }) => {
            let (Some(r), Lambda::Circle(y)) = (x.as_rational(), &report.input.lambda) else {
                return Ok(false);
            };
            let (gap, _) = period_gap(r, y, PrecisionPolicy::with_start(prec))?;
            Ok(&gap == exact && gap.is_positive() && BigInt::from(*period) == *r.denom())
        }
        SpectralVerdict::NotInSpectrum(NotInEvidence::DiophantineTailBound { cert, .. }) => {
            let q = cert.verified_up_to_q.clone();
            let r = verify_diophantine(x, cert, &q)?;
            Ok(r.passed && r.certificate.justification != Justification::AssertedByUser)
        }
        SpectralVerdict::InSpectrum(InEvidence::LiouvilleContradiction { j, growth, scan, .. }) => {
            let RotationNumber::Liouville(l) = x else {
                return Ok(false);
            };
            let own = default_witness(l);
            let w = LiouvilleWitness {
                alpha: scan.alpha.clone(),
                approximants: own.approximants.into_iter().filter(|c| c.index <= *j).collect(),
            };
            let v = verify_liouville_witness(x, &w, PrecisionPolicy::default())?;
            let again = liouville_contradiction_scan(&w, &scan.beta)?;
            let step = again.steps.iter().find(|s| s.j == *j);
            Ok(v.checks.iter().any(|c| c.index == *j && c.status == CheckStatus::Pass)
                && step.is_some_and(|s| &s.growth == growth && s.growth.exceeds_pow2(GROWTH_THRESHOLD_LOG2)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn p() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn lambda_descriptors() {
        for s in ["complex:2,0", "angle:rational:1/2", "orbit:3", "complex:0.5,-1/3"] {
            let l: Lambda = s.parse().unwrap();
            assert_eq!(l.to_string().parse::<Lambda>().unwrap(), l);
        }
        assert!("complex:2".parse::<Lambda>().is_err());
    }

    #[test]
    fn point_spectrum_examples() {
        let third = RotationNumber::rational(rat(1, 3));
        let h = point_spectrum(&third, SpaceTag::H, 10);
        assert!(h.complete);
        assert_eq!(
            h.eigenvalues.iter().map(|e| e.exact_angle.clone().unwrap()).collect::<Vec<_>>(),
            vec![rat(0, 1), rat(1, 3), rat(2, 3)]
        );
        let h0 = point_spectrum(&third, SpaceTag::H0, 10);
        assert_eq!(h0.eigenvalues[0].monomials, "z^(3 k), k >= 1");
        let g = point_spectrum(&RotationNumber::golden(), SpaceTag::H0, 3);
        assert_eq!(g.eigenvalues.iter().map(|e| e.n).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(!g.complete);
    }

    #[test]
    fn golden_criterion_bounded() {
        let g = RotationNumber::golden();
        let certs = Certificates {
            diophantine: Some(DiophantineCertificate::claim(rat(35, 100), rat(1, 1))),
            witness: None,
        };
        let cfg = CriterionConfig::single(rat(1, 2), rat(3, 4));
        let r = criterion_check(&g, &CirclePoint::one(), &cfg, &certs, p()).unwrap();
        let res = &r.results[0];
        assert_eq!(res.sup_argmax, 1);
        assert!((res.finite_sup.mid_f64() - 0.357_641_2).abs() < 1e-6, "{}", res.finite_sup.mid_f64());
        match (&res.tail, &res.overall) {
            (Tail::Bounded { bound, .. }, Overall::Bounded { .. }) => {
                assert_eq!(bound.certainly_lt(&res.finite_sup), Some(true))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn liouville_criterion_blows_up() {
        let x = RotationNumber::liouville(2, None).unwrap();
        let cfg = CriterionConfig {
            horizon: 300,
            ..CriterionConfig::single(rat(1, 2), rat(7, 10))
        };
        let r = criterion_check(&x, &CirclePoint::one(), &cfg, &Certificates::default(), p()).unwrap();
        match &r.results[0].overall {
            Overall::UnboundedWitness { n, value } => {
                assert_eq!(*n, 256);
                assert!(value.exceeds_pow2(121));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn third_against_minus_one() {
        let x = RotationNumber::rational(rat(1, 3));
        let y = CirclePoint::Angle(RotationNumber::rational(rat(1, 2)));
        let cfg = CriterionConfig::single(rat(1, 2), rat(3, 4));
        let r = criterion_check(&x, &y, &cfg, &Certificates::default(), p()).unwrap();
        assert_eq!(r.results[0].sup_argmax, 1);
        assert!(r.results[0].finite_sup.contains_rational(&rat(2, 3)));
        assert!(matches!(r.results[0].overall, Overall::Bounded { .. }));
        let v = classify(&x, &Lambda::angle(rat(1, 2)), SpaceTag::H0, &cfg, &Certificates::default(), p()).unwrap();
        match &v.verdict {
            SpectralVerdict::NotInSpectrum(NotInEvidence::RootOfUnityGap { exact, .. }) => {
                assert_eq!(exact, &Magnitude::Exact(int(1)))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradiction_scan_values() {
        let (_, w, _) = crate::certificates::construct_liouville(2, None).unwrap();
        let s = liouville_contradiction_scan(&w, &rat(3, 4)).unwrap();
        let j2 = &s.steps[0];
        assert_eq!(j2.j, 2);
        assert!((j2.growth.approx_log2().exp2() - 0.201_430).abs() < 1e-5);
        let j3 = &s.steps[1];
        assert!((j3.growth.approx_log2() - 139.098_9).abs() < 1e-3);
        assert!(s.diverges);
        assert_eq!(s.first_above, Some(3));
        assert!(liouville_contradiction_scan(&w, &rat(1, 2)).is_err());
    }

    #[test]
    fn classify_examples() {
        let cfg = CriterionConfig::default();
        let none = Certificates::default();
        let g = classify(&RotationNumber::golden(), &Lambda::one(), SpaceTag::H0, &cfg, &none, p()).unwrap();
        assert!(matches!(g.verdict, SpectralVerdict::NotInSpectrum(NotInEvidence::DiophantineTailBound { .. })), "{g:?}");
        assert!(reverify(&g).unwrap());
        let x = RotationNumber::liouville(2, Some(3)).unwrap();
        let l = classify(&x, &Lambda::one(), SpaceTag::H0, &cfg, &none, p()).unwrap();
        match &l.verdict {
            SpectralVerdict::InSpectrum(InEvidence::LiouvilleContradiction { j, .. }) => assert_eq!(*j, 3),
            other => panic!("{other:?}"),
        }
        assert!(reverify(&l).unwrap());
        let off = Lambda::Complex { re: int(2), im: int(0) };
        let o = classify(&RotationNumber::rational(rat(1, 3)), &off, SpaceTag::H0, &cfg, &none, p()).unwrap();
        match &o.verdict {
            SpectralVerdict::NotInSpectrum(NotInEvidence::OffCircleResolvent { delta }) => {
                assert!(delta.contains_rational(&int(1)))
            }
            other => panic!("{other:?}"),
        }
        let e = classify(&RotationNumber::golden(), &Lambda::Circle(CirclePoint::Orbit(4)), SpaceTag::H0, &cfg, &none, p()).unwrap();
        assert_eq!(e.verdict, eigen(4, SpaceTag::H0));
        let c = classify(&RotationNumber::golden(), &Lambda::one(), SpaceTag::H, &cfg, &none, p()).unwrap();
        assert_eq!(c.verdict, eigen(0, SpaceTag::H));
    }

    #[test]
    fn inhomogeneous_is_undetermined() {
        let y = Lambda::Circle(CirclePoint::Angle(RotationNumber::surd(0, 1, 2, 2).unwrap()));
        let cfg = CriterionConfig { horizon: 100, ..Default::default() };
        let v = classify(&RotationNumber::golden(), &y, SpaceTag::H0, &cfg, &Certificates::default(), p()).unwrap();
        assert_eq!(v.verdict.name(), "Undetermined");
    }

    #[test]
    fn verdict_json_round_trip() {
        let cfg = CriterionConfig { horizon: 50, ..Default::default() };
        let v = classify(&RotationNumber::rational(rat(1, 3)), &Lambda::angle(rat(1, 2)), SpaceTag::H0, &cfg, &Certificates::default(), p()).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        let back: VerdictReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        let val: serde_json::Value = serde_json::from_str(&s).unwrap();
        for k in ["input", "verdict", "evidence", "horizon", "precision_bits", "runtime_ms"] {
            assert!(val.get(k).is_some(), "{k}");
        }
    }
}
