//! `rotospec`: spectral classification for rotation composition operators.
//!
//! Exit codes: 0 decided or done, 1 usage error, 2 precision failure,
//! 3 undetermined.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use config::{FileConfig, Format, GlobalFlags, RunConfig, PRECISION_ENV};
use rotospec::arith::{Interval, Magnitude, Rational};
use rotospec::certificates::{auto_certificate, construct_liouville, verify_liouville_witness, DiophantineCertificate};
use rotospec::rotation::number::{format_rational, parse_rational};
use rotospec::rotation::{orbit_gaps, small_divisor_sequence, CirclePoint, RotationNumber, SmallDivisor};
use rotospec::series::{self, CoefficientStream, TransformedStream};
use rotospec::spectrum::{
    self, criterion_check, Certificates, InEvidence, Lambda, NotInEvidence, Overall, SpaceTag,
    SpectralVerdict, VerdictReport,
};
use rotospec::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "rotospec", version, about = "Certified spectra of rotation composition operators on H0(D)")]
struct Cli {
    /// Working precision in bits (overrides the config file and ROTOSPEC_PRECISION_BITS).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Finite horizon N for term-by-term checks.
    #[arg(long, global = true)]
    horizon: Option<u64>,
    /// Comma-separated alpha values for the criterion.
    #[arg(long, global = true)]
    alpha_grid: Option<String>,
    /// Fixed beta; the default is the midpoint of alpha and 1.
    #[arg(long, global = true)]
    beta: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// File of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Record wall-clock time in reports (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Inputs {
    /// rational:p/q, surd:(a+b*sqrt(d))/c, liouville:m[,J] or ball:c±r
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// angle:<x-form>, orbit:n or complex:re,im
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(Args, Debug)]
struct CertFlags {
    /// Diophantine constant c to verify and use for the tail.
    #[arg(long)]
    cert_c: Option<String>,
    #[arg(long, default_value = "1")]
    cert_delta: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify lambda against the spectrum.
    Classify {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        space: Option<String>,
        /// Classify the k points angle:j/k, j < k, instead of --lambda.
        #[arg(long, conflicts_with = "lambda")]
        lambda_grid: Option<u64>,
        #[command(flatten)]
        cert: CertFlags,
    },
    /// Build x(m) = sum m^-q_j with its witness.
    Construct {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Small divisors |r^n - lambda| for n in [from, n].
    Divisors {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        from: u64,
    },
    /// Gap structure of {k x mod 1 : k < n}.
    Orbit {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        n: u64,
    },
    /// The bounded-sequence criterion over the alpha grid.
    Criterion {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        cert: CertFlags,
    },
    /// Coefficients b_n = a_n / (r^n - lambda).
    Resolvent {
        #[command(flatten)]
        inputs: Inputs,
        /// ones, geometric:g or finite:n=re[,im];...
        #[arg(long)]
        coeffs: Option<String>,
        /// CSV file of n,re[,im] rows.
        #[arg(long, conflicts_with = "coeffs")]
        coeffs_file: Option<PathBuf>,
        #[arg(long)]
        n: u64,
        /// Comma-separated indices for the radius bound.
        #[arg(long)]
        window: Option<String>,
    },
    /// The golden rotation against x(2) at lambda = 1.
    Demo,
}

/// Exit status and reason for a failed run.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InsufficientPrecision(_) | Error::BeyondRange(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Run = std::result::Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("rotospec: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Run {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let rc = RunConfig::resolve(
        GlobalFlags {
            precision_bits: cli.precision_bits,
            horizon: cli.horizon,
            alpha_grid: cli.alpha_grid.as_deref(),
            beta: cli.beta.as_deref(),
            format: cli.format,
            timing: cli.timing,
        },
        file,
        std::env::var(PRECISION_ENV).ok(),
    )?;
    match cli.command {
        Command::Classify {
            inputs,
            space,
            lambda_grid,
            cert,
        } => cmd_classify(&rc, &inputs, space.as_deref(), lambda_grid, &cert),
        Command::Construct { m, depth } => cmd_construct(&rc, m, depth),
        Command::Divisors { inputs, n, from } => cmd_divisors(&rc, &inputs, from, n),
        Command::Orbit { inputs, n } => cmd_orbit(&rc, &inputs, n),
        Command::Criterion { inputs, cert } => cmd_criterion(&rc, &inputs, &cert),
        Command::Resolvent {
            inputs,
            coeffs,
            coeffs_file,
            n,
            window,
        } => cmd_resolvent(&rc, &inputs, coeffs.as_deref(), coeffs_file, n, window.as_deref()),
        Command::Demo => cmd_demo(&rc),
    }
}

fn x_of(rc: &RunConfig, inputs: &Inputs) -> Result<RotationNumber> {
    rc.descriptor(inputs.x.as_deref(), "x")?.parse()
}

fn lambda_of(rc: &RunConfig, inputs: &Inputs) -> Result<Lambda> {
    rc.descriptor(inputs.lambda.as_deref(), "lambda")?.parse()
}

fn circle_of(rc: &RunConfig, inputs: &Inputs) -> Result<CirclePoint> {
    rc.descriptor(inputs.lambda.as_deref(), "lambda")?.parse()
}

fn certificates(cert: &CertFlags) -> Result<Certificates> {
    let diophantine = match &cert.cert_c {
        Some(c) => Some(DiophantineCertificate::claim(
            parse_rational(c)?,
            parse_rational(&cert.cert_delta)?,
        )),
        None => None,
    };
    Ok(Certificates {
        diophantine,
        witness: None,
    })
}

fn emit_json<T: Serialize + ?Sized>(v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::domain(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn csv_unsupported(cmd: &str) -> Failure {
    Failure {
        code: 1,
        message: format!("{cmd} has no CSV output; use json or text"),
    }
}

fn approx(i: &Interval) -> String {
    let v = i.mid_f64();
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.4e}")
    } else {
        format!("{v:.6}")
    }
}

fn approx_mag(m: &Magnitude) -> String {
    match m {
        Magnitude::Zero => "0".into(),
        Magnitude::Exact(r) => format_rational(r),
        Magnitude::Log(_) => format!("2^{:.4}", m.approx_log2()),
        _ => format!("{:.6}", m.approx_f64()),
    }
}

fn verdict_code(v: &SpectralVerdict) -> u8 {
    match v {
        SpectralVerdict::Undetermined {
            precision_failure: true,
            ..
        } => 2,
        SpectralVerdict::Undetermined { .. } => 3,
        _ => 0,
    }
}

fn verdict_line(r: &VerdictReport) -> String {
    let head = format!("x = {}, lambda = {}, {}: {}", r.input.x, r.input.lambda, r.input.space, r.verdict.name());
    let detail = match &r.verdict {
        SpectralVerdict::Eigenvalue { n, eigenvector_note } => format!("r^{n} = lambda; {eigenvector_note}"),
        SpectralVerdict::InSpectrum(InEvidence::LiouvilleContradiction { j, growth, .. }) => {
            format!("Liouville contradiction at j = {j}, growth 2^{:.4}", growth.approx_log2())
        }
        SpectralVerdict::NotInSpectrum(NotInEvidence::OffCircleResolvent { delta }) => {
            format!("off the circle, |r^n - lambda| >= {}", approx(delta))
        }
        SpectralVerdict::NotInSpectrum(NotInEvidence::RootOfUnityGap { exact, argmin, period, .. }) => {
            format!("least gap {} at n = {argmin}, period {period}", approx_mag(exact))
        }
        SpectralVerdict::NotInSpectrum(NotInEvidence::DiophantineTailBound { cert, horizon_sup, tail_bound, .. }) => {
            format!(
                "Diophantine c = {}, delta = {}; sup over n <= N {}, tail <= {}",
                format_rational(&cert.c),
                format_rational(&cert.delta),
                approx(horizon_sup),
                approx(tail_bound)
            )
        }
        SpectralVerdict::Undetermined { reason, .. } => reason.clone(),
    };
    format!("{head} ({detail})")
}

fn timed<T>(rc: &RunConfig, f: impl FnOnce() -> T) -> (T, Option<u64>) {
    let t = Instant::now();
    let v = f();
    (v, rc.timing.then(|| t.elapsed().as_millis() as u64))
}

fn cmd_classify(
    rc: &RunConfig,
    inputs: &Inputs,
    space: Option<&str>,
    grid: Option<u64>,
    cert: &CertFlags,
) -> Run {
    let x = x_of(rc, inputs)?;
    let space: SpaceTag = match space.or(rc.file.get("space")) {
        Some(s) => s.parse()?,
        None => SpaceTag::H0,
    };
    let certs = certificates(cert)?;
    let cfg = rc.criterion();
    let policy = rc.policy();
    let one = |lambda: &Lambda| -> Result<VerdictReport> {
        let (r, ms) = timed(rc, || spectrum::classify(&x, lambda, space, &cfg, &certs, policy));
        let mut r = r?;
        r.runtime_ms = ms;
        Ok(r)
    };
    let reports: Vec<VerdictReport> = match grid {
        Some(0) => return Err(Error::Parse("--lambda-grid needs k >= 1".into()).into()),
        Some(k) => {
            let lambdas: Vec<Lambda> = (0..k)
                .map(|j| Lambda::angle(Rational::new(j.into(), k.into())))
                .collect();
            lambdas.par_iter().map(one).collect::<Result<_>>()?
        }
        None => vec![one(&lambda_of(rc, inputs)?)?],
    };
    match rc.format {
        Format::Json if grid.is_some() => emit_json(&reports)?,
        Format::Json => emit_json(&reports[0])?,
        Format::Text => {
            for r in &reports {
                println!("{}", verdict_line(r));
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let io = |e: csv::Error| Failure {
                code: 1,
                message: e.to_string(),
            };
            w.write_record(["x", "lambda", "space", "verdict"]).map_err(io)?;
            for r in &reports {
                w.write_record([
                    r.input.x.to_string(),
                    r.input.lambda.to_string(),
                    r.input.space.to_string(),
                    r.verdict.name().to_string(),
                ])
                .map_err(io)?;
            }
            w.flush().map_err(|e| Failure {
                code: 1,
                message: e.to_string(),
            })?;
        }
    }
    Ok(reports.iter().map(|r| verdict_code(&r.verdict)).max().unwrap_or(0))
}

#[derive(Serialize)]
struct ConstructOutput {
    x: RotationNumber,
    construction: rotospec::certificates::LiouvilleConstruction,
    witness: rotospec::certificates::LiouvilleWitness,
    verification: rotospec::certificates::WitnessReport,
}

fn cmd_construct(rc: &RunConfig, m: u64, depth: Option<usize>) -> Run {
    let (x, witness, construction) = construct_liouville(m, depth)?;
    let verification = verify_liouville_witness(&x, &witness, rc.policy())?;
    match rc.format {
        Format::Json => emit_json(&ConstructOutput {
            x,
            construction,
            witness,
            verification,
        })?,
        Format::Text => {
            println!("x({m}) truncated at depth {}", construction.depth);
            for (j, s) in construction.partial_sums.iter().enumerate() {
                let q = match &construction.q_sequence[j] {
                    rotospec::certificates::BigValue::Exact(q) if q.bits() <= 64 => q.to_string(),
                    rotospec::certificates::BigValue::Exact(q) => format!("2^{:.4}", q.bits() as f64),
                    rotospec::certificates::BigValue::Log(l) => format!("2^{:.4}", l.approx_log2()),
                };
                let sum = if s.denom().bits() <= 64 {
                    s.to_string()
                } else {
                    "(large)".to_string()
                };
                println!("j = {}: q = {q}, partial sum {sum}", j + 1);
            }
            println!(
                "witness alpha = {}: passed {:?}, failing {:?}",
                format_rational(&witness.alpha),
                verification.passed,
                verification.failing
            );
        }
        Format::Csv => return Err(csv_unsupported("construct")),
    }
    Ok(0)
}

fn cmd_divisors(rc: &RunConfig, inputs: &Inputs, from: u64, n: u64) -> Run {
    let x = x_of(rc, inputs)?;
    let y = circle_of(rc, inputs)?;
    if from == 0 || from > n {
        return Err(Error::Parse("need 1 <= from <= n".into()).into());
    }
    let rows: Vec<SmallDivisor> = small_divisor_sequence(&x, &y, n, rc.policy())
        .skip(from as usize - 1)
        .collect::<Result<_>>()?;
    match rc.format {
        Format::Json => emit_json(&rows)?,
        Format::Text => {
            for d in &rows {
                let eigen = if d.eigen { " (eigen)" } else { "" };
                println!("n = {}: |r^n - lambda| = {} [{}]{eigen}", d.n, approx_mag(&d.divisor), d.divisor.tier());
            }
        }
        Format::Csv => {
            let mut out = std::io::stdout().lock();
            let io = |e: std::io::Error| Failure {
                code: 1,
                message: e.to_string(),
            };
            writeln!(out, "n,tier,divisor_log2,eigen").map_err(io)?;
            for d in &rows {
                let l = if d.divisor.is_zero() {
                    "-inf".to_string()
                } else {
                    format!("{:.6}", d.divisor.approx_log2())
                };
                writeln!(out, "{},{},{l},{}", d.n, d.divisor.tier(), d.eigen).map_err(io)?;
            }
        }
    }
    Ok(0)
}

fn cmd_orbit(rc: &RunConfig, inputs: &Inputs, n: u64) -> Run {
    let x = x_of(rc, inputs)?;
    let report = orbit_gaps(&x, n, rc.policy())?;
    match rc.format {
        Format::Json => emit_json(&report)?,
        Format::Text => {
            println!("{} points, {} distinct gaps", report.points, report.distinct());
            for c in &report.classes {
                println!("  {} x {}", approx(&c.length), c.multiplicity);
            }
            if let Some(s) = report.largest_is_sum {
                println!("largest is the sum of the others: {s}");
            }
        }
        Format::Csv => return Err(csv_unsupported("orbit")),
    }
    Ok(0)
}

fn cmd_criterion(rc: &RunConfig, inputs: &Inputs, cert: &CertFlags) -> Run {
    let x = x_of(rc, inputs)?;
    let y = circle_of(rc, inputs)?;
    let mut certs = certificates(cert)?;
    let cfg = rc.criterion();
    if certs.diophantine.is_none() && matches!(x, RotationNumber::Surd(_)) {
        certs.diophantine = Some(auto_certificate(&x, &cfg.certificate_horizon)?);
    }
    let report = criterion_check(&x, &y, &cfg, &certs, rc.policy())?;
    match rc.format {
        Format::Json => emit_json(&report)?,
        Format::Text => {
            for r in &report.results {
                let overall = match &r.overall {
                    Overall::Bounded { c } => format!("bounded by {}", approx(c)),
                    Overall::UnboundedWitness { n, value } => {
                        format!("term 2^{:.4} at n = {n}", value.approx_log2())
                    }
                    Overall::Inconclusive => "inconclusive".into(),
                };
                println!(
                    "alpha = {}, beta = {}: sup over n <= {} is {} at n = {}; {overall}",
                    format_rational(&r.alpha),
                    format_rational(&r.beta),
                    report.horizon,
                    approx(&r.finite_sup),
                    r.sup_argmax
                );
            }
        }
        Format::Csv => return Err(csv_unsupported("criterion")),
    }
    Ok(if report.all_bounded() { 0 } else { 3 })
}

#[derive(Serialize)]
struct ResolventOutput {
    stream: TransformedStream,
    radius: Option<series::RadiusBound>,
}

fn cmd_resolvent(
    rc: &RunConfig,
    inputs: &Inputs,
    coeffs: Option<&str>,
    coeffs_file: Option<PathBuf>,
    n: u64,
    window: Option<&str>,
) -> Run {
    let x = x_of(rc, inputs)?;
    let lambda = lambda_of(rc, inputs)?;
    let f: CoefficientStream = match (coeffs, coeffs_file) {
        (_, Some(p)) => {
            let file = std::fs::File::open(&p)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", p.display())))?;
            series::read_coefficients_csv(file)?
        }
        (Some(s), None) => s.parse()?,
        (None, None) => CoefficientStream::Ones,
    };
    let stream = series::resolvent_apply(&f, &x, &lambda, n, rc.policy())?;
    let radius = match window {
        Some(w) => {
            let idx = w
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad index {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            series::radius_window_estimate(&stream, &idx)?
        }
        None => None,
    };
    match rc.format {
        Format::Json => emit_json(&ResolventOutput { stream, radius })?,
        Format::Csv => series::write_csv(&stream, std::io::stdout().lock())?,
        Format::Text => {
            for e in &stream.entries {
                println!(
                    "n = {}: |r^n - lambda| = {}, |b_n| = {}",
                    e.n,
                    approx_mag(&e.divisor),
                    approx_mag(&e.magnitude)
                );
            }
            if let Some(r) = &radius {
                println!("radius <= {} (from n = {})", r.bound.hi().to_f64(), r.argmin);
            }
        }
    }
    Ok(0)
}

fn cmd_demo(rc: &RunConfig) -> Run {
    let cfg = rc.criterion();
    let policy = rc.policy();
    let cases = [RotationNumber::golden(), RotationNumber::liouville(2, None)?];
    let reports: Vec<VerdictReport> = cases
        .iter()
        .map(|x| {
            let (r, ms) = timed(rc, || {
                spectrum::classify(x, &Lambda::one(), SpaceTag::H0, &cfg, &Certificates::default(), policy)
            });
            r.map(|mut r| {
                r.runtime_ms = ms;
                r
            })
        })
        .collect::<Result<_>>()?;
    match rc.format {
        Format::Json => emit_json(&reports)?,
        Format::Csv => return Err(csv_unsupported("demo")),
        Format::Text => {
            let label = |r: &VerdictReport| match r.verdict.in_spectrum() {
                Some(true) => "1 is in the spectrum",
                Some(false) => "1 is not in the spectrum",
                None => "undetermined",
            };
            println!("golden rotation: {} ({})", label(&reports[0]), reports[0].verdict.name());
            println!("Liouville x(2): {} ({})", label(&reports[1]), reports[1].verdict.name());
        }
    }
    let expected = reports[0].verdict.in_spectrum() == Some(false) && reports[1].verdict.in_spectrum() == Some(true);
    Ok(if expected {
        0
    } else {
        reports.iter().map(|r| verdict_code(&r.verdict)).max().unwrap_or(3).max(3)
    })
}
