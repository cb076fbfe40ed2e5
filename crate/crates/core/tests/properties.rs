//! Randomised invariants across the crate.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotospec::arith::{
    int, interval_sin_pi, log2_of_product, nearest_int_distance, rat, Dyadic, Factor, Interval,
    LogMagnitude, Magnitude, PrecisionPolicy, Rational,
};
use rotospec::certificates::{
    construction_chain, verify_diophantine, verify_liouville_witness, DiophantineCertificate,
    LiouvilleWitness,
};
use rotospec::contfrac::{cf_expand, convergents_beyond, convergents_of, determinant};
use rotospec::rotation::{moebius, orbit_gaps, small_divisor, CirclePoint, LiouvilleNumber, RotationNumber};
use rotospec::series::{resolvent_apply, CoefficientStream, ComplexInterval, ExactComplex};
use rotospec::spectrum::{
    classify, criterion_check, reverify, Certificates, CriterionConfig, Lambda, Overall, SpaceTag,
    SpectralVerdict,
};

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

fn unit_fraction() -> impl Strategy<Value = Rational> {
    (1u64..=64).prop_flat_map(|q| (0..q, Just(q))).prop_map(|(p, q)| rat(p, q))
}

fn surd() -> impl Strategy<Value = RotationNumber> {
    // (a + b sqrt(d)) / c with d not a square
    (prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, 11, 13]), -5i64..=5, 1i64..=3, 1i64..=7)
        .prop_map(|(d, a, b, c)| RotationNumber::surd(a, b, c, d).unwrap())
}

/// `m <= r` decided exactly for the exact tiers.
fn magnitude_le(m: &Magnitude, r: &Rational) -> bool {
    match m {
        Magnitude::Zero => true,
        Magnitude::Exact(s) => s <= r,
        Magnitude::Sqrt(v) => v <= &(r * r),
        other => {
            let i = other.to_interval(128).unwrap();
            i.hi() <= &Dyadic::from_rational(r, 128, rotospec::arith::Round::Down)
        }
    }
}

// arith

#[test]
fn sin_pi_encloses_double_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let q: u64 = rng.gen_range(1..=100_000);
        let p: u64 = rng.gen_range(0..=q / 2);
        let t = rat(p, q);
        let s = interval_sin_pi(&Interval::from_rational(&t, 64)).unwrap();
        let v = (std::f64::consts::PI * p as f64 / q as f64).sin();
        // allow the rounding of the double computation itself
        let eps = 4.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE);
        let band = Interval::new(
            Dyadic::from_f64(v - eps).unwrap(),
            Dyadic::from_f64(v + eps).unwrap(),
            64,
        );
        assert!(s.overlaps(&band), "t = {t}");
    }
}

proptest! {
    #[test]
    fn nearest_int_distance_is_periodic(p in -10_000i64..10_000, q in 1i64..500, k in -50i64..50) {
        let x = rat(p, q);
        let d = nearest_int_distance(&x);
        prop_assert_eq!(&d, &nearest_int_distance(&(&x + int(k))));
        prop_assert!(d >= Rational::zero() && d <= rat(1, 2));
    }

    #[test]
    fn log_of_product_is_additive(a in 1u64..10_000, b in 1u64..10_000, c in 1u64..10_000, d in 1u64..10_000) {
        let x = rat(a, b);
        let y = rat(c, d);
        let one = BigInt::one();
        let lx = log2_of_product(&[(Factor::Rational(x.clone()), one.clone())], 128).unwrap();
        let ly = log2_of_product(&[(Factor::Rational(y.clone()), one.clone())], 128).unwrap();
        let joint = log2_of_product(&[(Factor::Rational(x.clone()), one.clone()), (Factor::Rational(y.clone()), one.clone())], 128).unwrap();
        let direct = LogMagnitude::from_rational(&(x * y), 128).unwrap();
        let sum = lx.mul(&ly);
        prop_assert!(joint.log2(128).unwrap().overlaps(&sum.log2(128).unwrap()));
        prop_assert!(direct.log2(128).unwrap().overlaps(&sum.log2(128).unwrap()));
    }
}

// contfrac

proptest! {
    #[test]
    fn continued_fraction_laws(x in unit_fraction(), extra in 0u64..1000) {
        let x = &x + rat(extra % 7, 1001 + extra);
        let x = rotospec::arith::frac(&x);
        let cf = cf_expand(&x);
        prop_assert_eq!(cf.value(), x.clone());
        let c = convergents_of(&cf.quotients);
        for w in c.windows(2) {
            prop_assert_eq!(determinant(&w[0], &w[1]).abs(), BigInt::one());
            if w[0].index >= 1 {
                prop_assert!(w[1].q > w[0].q);
            }
            let err = (&x - w[0].value()).abs();
            let bound = Rational::new(BigInt::one(), &w[0].q * &w[1].q);
            if w[1].value() == x {
                // the last step lands on x itself
                prop_assert!(err <= bound);
            } else {
                prop_assert!(err < bound);
            }
        }
    }
}

// rotation

proptest! {
    #[test]
    fn divisor_depends_only_on_distance(x in unit_fraction(), y in unit_fraction(), n in 1u64..200, k in -5i64..5) {
        let rx = RotationNumber::rational(x.clone());
        let a = small_divisor(&rx, n, &CirclePoint::Angle(RotationNumber::rational(y.clone())), policy()).unwrap();
        // the same angle written with an integer offset is normalised away
        let shifted = RotationNumber::Rational(&y + int(k));
        let b = small_divisor(&rx, n, &CirclePoint::Angle(shifted), policy()).unwrap();
        prop_assert_eq!(&a.divisor, &b.divisor);
        // complex conjugation: x -> -x, y -> -y
        let c = small_divisor(
            &RotationNumber::rational(-x.clone()),
            n,
            &CirclePoint::Angle(RotationNumber::rational(-y.clone())),
            policy(),
        )
        .unwrap();
        prop_assert_eq!(&a.divisor, &c.divisor);
        prop_assert_eq!(a.eigen, a.divisor.is_zero());
    }

    #[test]
    fn orbit_point_is_an_eigen_collision(x in unit_fraction(), n in 1u64..128) {
        let rx = RotationNumber::rational(x.clone());
        let d = small_divisor(&rx, n, &CirclePoint::Orbit(n), policy()).unwrap();
        prop_assert!(d.eigen && d.divisor == Magnitude::Zero);
        let d = small_divisor(&rx, n, &CirclePoint::Angle(RotationNumber::rational(&x * int(n))), policy()).unwrap();
        prop_assert!(d.eigen && d.divisor == Magnitude::Zero);
    }

    #[test]
    fn three_gaps_for_surds(x in surd(), n in 2u64..3000) {
        let r = orbit_gaps(&x, n, policy()).unwrap();
        prop_assert!(r.distinct() <= 3);
        if r.distinct() == 3 {
            prop_assert_eq!(r.largest_is_sum, Some(true));
            let s = r.classes[0].length.add(&r.classes[1].length);
            prop_assert!(s.overlaps(&r.classes[2].length));
        }
    }

    #[test]
    fn three_gaps_for_rationals(x in unit_fraction(), n in 2u64..3000) {
        let r = orbit_gaps(&RotationNumber::rational(x), n, policy()).unwrap();
        prop_assert!(r.distinct() <= 3);
        if r.distinct() == 3 {
            prop_assert_eq!(r.largest_is_sum, Some(true));
        }
    }
}

#[test]
fn moebius_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let a = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..std::f64::consts::TAU));
        let z = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let back = moebius(a, moebius(a, z).unwrap()).unwrap();
        assert!((back - z).norm() < 1e-9, "a = {a}, z = {z}");
        assert!(moebius(a, a).unwrap().norm() < 1e-12);
    }
}

// certificates

#[test]
fn construction_divisibility_and_growth() {
    for m in 2..=5u64 {
        let l = LiouvilleNumber::new(m, None).unwrap();
        let q = l.q();
        for (j, w) in q.windows(2).enumerate() {
            assert!((&w[1] % &w[0]).is_zero(), "m = {m}, j = {}", j + 1);
        }
        for (j, qj) in q.iter().enumerate() {
            assert!(qj >= &BigInt::from(m).pow(j as u32 + 1));
        }
        for j in 2..=l.depth() {
            let (tail, bound) = construction_chain(&l, j).unwrap();
            assert_eq!(tail.certainly_le(&bound), Some(true), "m = {m}, j = {j}");
        }
    }
}

#[test]
fn certificate_kinds_exclude_each_other() {
    let horizon = BigInt::from(1_000_000);
    let golden = RotationNumber::golden();
    let cert = DiophantineCertificate::claim(rat(35, 100), int(1));
    let report = verify_diophantine(&golden, &cert, &horizon).unwrap();
    assert!(report.passed);
    // golden convergents used as would-be Liouville approximants
    let conv: Vec<_> = convergents_beyond(&golden, &horizon)
        .unwrap()
        .into_iter()
        .filter(|c| c.q <= horizon && c.index >= 1)
        .collect();
    let w = LiouvilleWitness {
        alpha: rat(1, 2),
        approximants: conv.clone(),
    };
    let wr = verify_liouville_witness(&golden, &w, policy()).unwrap();
    assert!(!wr.passed);
    for c in wr.checks.iter().filter(|c| c.status == rotospec::certificates::CheckStatus::Pass) {
        let d = report.checks.iter().find(|k| k.convergent.q == c.q).unwrap();
        assert!(d.passed, "q = {} passes both", c.q);
    }
    // x(2) refuses every Diophantine constant at some q_j
    let x2 = RotationNumber::liouville(2, None).unwrap();
    for c in [rat(1, 10), rat(1, 1000), rat(1, 1_000_000)] {
        let r = verify_diophantine(&x2, &DiophantineCertificate::claim(c, int(1)), &BigInt::from(256)).unwrap();
        assert!(!r.passed);
    }
}

// spectrum

fn quick_config() -> CriterionConfig {
    CriterionConfig {
        horizon: 300,
        certificate_horizon: BigInt::from(10_000),
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn raising_precision_never_flips_a_verdict(
        x in prop_oneof![unit_fraction().prop_map(RotationNumber::rational), surd()],
        y in unit_fraction(),
    ) {
        let lambda = Lambda::angle(y);
        let mut seen: Option<bool> = None;
        for bits in [64, 128, 256] {
            let r = classify(&x, &lambda, SpaceTag::H0, &quick_config(), &Certificates::default(), PrecisionPolicy::with_start(bits)).unwrap();
            if let Some(v) = r.verdict.in_spectrum() {
                prop_assert!(seen.is_none_or(|s| s == v));
                seen = Some(v);
                prop_assert!(reverify(&r).unwrap());
            }
        }
    }

    #[test]
    fn orbit_points_are_eigenvalues(x in prop_oneof![unit_fraction().prop_map(RotationNumber::rational), surd()], n in 1u64..40) {
        let r = classify(&x, &Lambda::Circle(CirclePoint::Orbit(n)), SpaceTag::H0, &quick_config(), &Certificates::default(), policy()).unwrap();
        match (&r.verdict, x.as_rational()) {
            (SpectralVerdict::Eigenvalue { n: k, .. }, None) => prop_assert_eq!(*k, n),
            (SpectralVerdict::Eigenvalue { n: k, .. }, Some(q)) => {
                let m = q.denom().clone();
                prop_assert!((BigInt::from(n) - BigInt::from(*k)) % m == BigInt::zero());
            }
            (v, _) => prop_assert!(false, "{:?}", v),
        }
    }

    #[test]
    fn rational_criterion_matches_one_period(p in 0u64..64, m in 1u64..=24, a in 1u64..10, b in 1u64..10) {
        let x = rat(p, m);
        let y = rat(2 * a - 1, 2 * m * b);
        // y misses every multiple of 1/m
        let alpha = rat(a, a + b);
        let beta = rat(a + b - 1, a + b) * rat(1, 2) + rat(1, 2);
        prop_assume!(alpha < beta);
        let cfg = CriterionConfig { horizon: 10_000, ..CriterionConfig::single(alpha.clone(), beta.clone()) };
        let rx = RotationNumber::rational(x.clone());
        let rep = criterion_check(&rx, &CirclePoint::Angle(RotationNumber::rational(y.clone())), &cfg, &Certificates::default(), policy()).unwrap();
        let res = &rep.results[0];
        let Overall::Bounded { c } = &res.overall else { panic!("{:?}", res.overall) };
        // brute force over the first period in double precision
        let ratio = (alpha.clone() / beta.clone()).to_f64().unwrap();
        let (xf, yf) = (p as f64 / m as f64, (2 * a - 1) as f64 / (2 * m * b) as f64);
        let mut best: f64 = 0.0;
        let mut min_gap = f64::INFINITY;
        let period = m / num_integer::gcd(p, m).max(1);
        for n in 1..=period.max(1) {
            let t = (n as f64 * xf - yf).rem_euclid(1.0);
            let d = 2.0 * (std::f64::consts::PI * t.min(1.0 - t)).sin();
            min_gap = min_gap.min(d);
            best = best.max(ratio.powi(n as i32) / d);
        }
        prop_assert!((res.finite_sup.mid_f64() - best).abs() <= 1e-9 * best);
        prop_assert!(c.hi().to_f64() <= ratio / min_gap * (1.0 + 1e-9));
    }
}

// series

fn exact_or_enclosed(e: &Option<ExactComplex>, i: &Option<ComplexInterval>) -> ComplexInterval {
    match (e, i) {
        (_, Some(i)) => i.clone(),
        (Some(e), None) => ComplexInterval {
            re: Interval::from_rational(&e.re, 128),
            im: Interval::from_rational(&e.im, 128),
        },
        (None, None) => panic!("entry carries neither form"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn resolvent_round_trip(x in unit_fraction(), re in -8i64..8, im in -8i64..8, d in 1i64..4, n in 1u64..40) {
        let z = ExactComplex { re: rat(re, d), im: rat(im, d) };
        prop_assume!(z.norm_sqr() != Rational::one());
        let f = CoefficientStream::Geometric(rat(1, 2));
        let t = resolvent_apply(&f, &RotationNumber::rational(x), &Lambda::Complex { re: z.re.clone(), im: z.im.clone() }, n, policy()).unwrap();
        let delta = t.delta.clone().unwrap();
        for e in &t.entries {
            let b = exact_or_enclosed(&e.b_exact, &e.b);
            let s = exact_or_enclosed(&e.shift_exact, &e.shift);
            prop_assert!(b.mul(&s).contains(&e.a));
            let a = e.a.re.abs();
            match &delta {
                Magnitude::Exact(d) => prop_assert!(magnitude_le(&e.magnitude, &(a / d))),
                d => {
                    let bound = Interval::from_rational(&a, 128).div(&d.to_interval(128).unwrap()).unwrap();
                    prop_assert!(e.magnitude.to_interval(128).unwrap().lo() <= bound.hi());
                }
            }
        }
    }

    #[test]
    fn resolvent_round_trip_on_circle(x in surd(), y in unit_fraction(), n in 1u64..40) {
        let t = resolvent_apply(&CoefficientStream::Ones, &x, &Lambda::angle(y), n, policy()).unwrap();
        for e in &t.entries {
            let b = exact_or_enclosed(&e.b_exact, &e.b);
            let s = exact_or_enclosed(&e.shift_exact, &e.shift);
            prop_assert!(b.mul(&s).contains(&e.a));
        }
    }
}

#[test]
fn seminorm_follows_criterion_bound() {
    let cases = [
        (RotationNumber::golden(), rat(0, 1)),
        (RotationNumber::rational(rat(2, 7)), rat(1, 10)),
        (RotationNumber::surd(0, 1, 2, 2).unwrap(), rat(1, 3)),
    ];
    for (x, y) in cases {
        for (alpha, beta) in [(rat(1, 2), rat(3, 4)), (rat(9, 10), rat(19, 20))] {
            let cfg = CriterionConfig {
                horizon: 500,
                ..CriterionConfig::single(alpha.clone(), beta.clone())
            };
            let certs = Certificates {
                diophantine: match &x {
                    RotationNumber::Surd(_) => Some(rotospec::certificates::auto_certificate(&x, &cfg.certificate_horizon).unwrap()),
                    _ => None,
                },
                witness: None,
            };
            let rep = criterion_check(&x, &CirclePoint::Angle(RotationNumber::rational(y.clone())), &cfg, &certs, policy()).unwrap();
            let Overall::Bounded { c } = &rep.results[0].overall else {
                panic!("{x}: {:?}", rep.results[0].overall)
            };
            let t = resolvent_apply(&CoefficientStream::Ones, &x, &Lambda::angle(y.clone()), 500, policy()).unwrap();
            let bound = c.mul_rational(&beta);
            let mut pow = Rational::one();
            for e in &t.entries {
                pow *= &alpha;
                let v = e.magnitude.to_interval(128).unwrap().mul_rational(&pow);
                assert!(v.lo() <= bound.hi(), "{x}, n = {}", e.n);
            }
        }
    }
}
