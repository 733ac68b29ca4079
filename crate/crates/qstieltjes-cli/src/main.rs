//! Command-line front end: verification sweeps, moment and Stieltjes
//! evaluation, machine-readable JSON/CSV reports.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
//! 3 numerical failure (pole / divergence / truncation).

mod checks;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qstieltjes::family::FamilySpec;
use qstieltjes::lattice::SeriesResult;
use qstieltjes::point::EvalPoint;
use qstieltjes::scalar::{parse_rational, Mode, QContext, DEFAULT_PRECISION};
use qstieltjes::stieltjes::{stieltjes_lattice, stieltjes_series};
use qstieltjes::{QError, Result};

use checks::{Perturb, RunCfg};
use report::{CheckRow, Report, SampleRow};

#[derive(Parser)]
#[command(name = "qstieltjes", version, about = "Classical q-orthogonal polynomials: moments, Stieltjes functions, and verification sweeps", max_term_width = 100)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scalar backend: exact rationals over Q(sqrt(q)) or arbitrary-precision floats
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,

    /// Decimal digits of float precision (>= 30)
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: usize,

    /// Pass/fail tolerance override, e.g. `1/1000000` or `1e-45`
    /// (default: 10^-(precision-15), exact zero in exact mode)
    #[arg(long, global = true)]
    tol: Option<String>,

    /// Seed for randomized draws
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Write the report to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,

    /// Worker threads for independent sweep points
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepArg {
    Lattice,
    Closed,
    Series,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbArg {
    Tau,
    Constant,
    Moment,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form q-moments against brute-force lattice sums
    Moments {
        /// Family descriptor, e.g. `charlier:q=1/2,mu=1/2`
        #[arg(long)]
        family: String,
        /// Moment orders, `LO..HI` inclusive
        #[arg(long, default_value = "0..8")]
        k: String,
    },
    /// Evaluate the q-Stieltjes function at one point
    Stieltjes {
        #[arg(long)]
        family: String,
        /// Evaluation point t = q^{-z} as a rational
        #[arg(long)]
        t: String,
        #[arg(long, value_enum, default_value_t = RepArg::Lattice)]
        rep: RepArg,
        /// Terms for the formal series representation
        #[arg(long, default_value_t = 8)]
        n_terms: usize,
    },
    /// Residual sweep of the first-order non-homogeneous difference equation
    VerifyTheorem {
        #[arg(long)]
        family: String,
        /// Number of t points
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// The transformation-identity battery at a given q
    VerifyIdentities {
        /// Base q as a rational in (0, 1)
        #[arg(long, default_value = "1/2")]
        q: String,
        /// Random draws per identity
        #[arg(long, default_value_t = 20)]
        draws: usize,
    },
    /// Orthogonal-basis data: TTRR coefficients, norms, eigenvalues
    Polys {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
    /// Pade homogeneous-system residuals
    Pade {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 5)]
        n_max: u32,
    },
    /// The full ordered verification battery
    VerifyAll {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Largest moment order exercised
        #[arg(long, default_value_t = 8)]
        k_max: u32,
        /// Random draws per identity
        #[arg(long, default_value_t = 8)]
        draws: usize,
        /// Keep running after the first failed check
        #[arg(long)]
        keep_going: bool,
        /// Corrupt one quantity by 1% (negative control; the matching check must fail)
        #[arg(long, value_enum)]
        perturb: Option<PerturbArg>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(checks::error_exit_code(&e) as u8)
        }
    }
}

fn mode_of(c: &Common) -> Mode {
    match c.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    }
}

fn parse_family(desc: &str, c: &Common) -> Result<FamilySpec> {
    FamilySpec::parse(desc, mode_of(c), c.precision)
}

/// Tolerance for pass/fail rows: the override, the context default, or
/// exact zero.
fn tolerance(ctx: &QContext, c: &Common) -> Result<qstieltjes::Scalar> {
    match &c.tol {
        Some(text) => parse_tol(text, ctx),
        None => Ok(ctx.tol().unwrap_or_else(|| ctx.zero())),
    }
}

fn parse_tol(text: &str, ctx: &QContext) -> Result<qstieltjes::Scalar> {
    if let Some(rest) = text.strip_prefix("1e-") {
        let k: i64 = rest
            .parse()
            .map_err(|_| QError::Parse(format!("bad tolerance `{text}`")))?;
        return Ok(ctx.pow10(-k));
    }
    Ok(ctx.from_rational(&parse_rational(text)?))
}

fn parse_k_range(text: &str) -> Result<(u32, u32)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| QError::Parse(format!("bad k range `{text}`, expected LO..HI")))?;
    let lo: u32 = lo
        .parse()
        .map_err(|_| QError::Parse(format!("bad k range `{text}`")))?;
    let hi: u32 = hi
        .parse()
        .map_err(|_| QError::Parse(format!("bad k range `{text}`")))?;
    if hi < lo {
        return Err(QError::Parse(format!("empty k range `{text}`")));
    }
    Ok((lo, hi))
}

fn cfg_for(ctx: &QContext, c: &Common, points: usize, k_max: u32, perturb: Option<Perturb>) -> Result<RunCfg> {
    Ok(RunCfg {
        tol: tolerance(ctx, c)?,
        points,
        k_max,
        seed: c.seed,
        jobs: c.jobs.max(1),
        perturb,
    })
}

fn emit(report: &Report, c: &Common) -> Result<ExitCode> {
    let body = match c.format {
        FormatArg::Json => report.to_json(),
        FormatArg::Csv => report.to_csv(),
    };
    match &c.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| QError::Parse(format!("cannot open `{path}`: {e}")))?;
            writeln!(f, "{body}").map_err(|e| QError::Parse(format!("write failed: {e}")))?;
        }
        None => println!("{body}"),
    }
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn mode_name(c: &Common) -> &'static str {
    match c.mode {
        ModeArg::Exact => "exact",
        ModeArg::Float => "float",
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let c = &cli.common;
    let started = Instant::now();
    match &cli.command {
        Command::Moments { family, k } => {
            let fam = parse_family(family, c)?;
            let was = parse_k_range(k)?;
            let cfg = cfg_for(fam.ctx(), c, 0, was.1, None)?;
            let mut report = base_report(&fam, c);
            let mut row = checks::check_moments(&fam, &cfg)?;
            row.samples.retain(|s| {
                let k: u32 = s.sample.trim_start_matches("k=").parse().unwrap_or(0);
                k >= was.0
            });
            report.checks.push(row);
            finish(report, started, c)
        }
        Command::Stieltjes {
            family,
            t,
            rep,
            n_terms,
        } => {
            let fam = parse_family(family, c)?;
            let ctx = fam.ctx();
            let cfg = cfg_for(ctx, c, 0, 0, None)?;
            let pt = EvalPoint::new(ctx.from_rational(&parse_rational(t)?), ctx)?;
            let (name, value, extra): (&str, _, Option<SeriesResult>) = match rep {
                RepArg::Lattice => ("lattice", stieltjes_lattice(&fam, &pt)?, None),
                RepArg::Closed => ("closed", fam.stieltjes_closed(&pt)?, None),
                RepArg::Series => {
                    let res = stieltjes_series(&fam, &pt, *n_terms)?;
                    ("series", res.value.clone(), Some(res))
                }
            };
            let mut report = base_report(&fam, c);
            let detail = match extra {
                Some(res) => format!(
                    "value={} terms_used={} last_term={}",
                    value.serialize(),
                    res.terms_used,
                    res.tail_bound.serialize()
                ),
                None => format!("value={}", value.serialize()),
            };
            report.checks.push(CheckRow {
                name: format!("stieltjes {name}"),
                anchor: "stieltjes-eval".into(),
                residual: "0".into(),
                tol: cfg.tol.serialize(),
                pass: true,
                samples: vec![SampleRow {
                    sample: format!("t={}", pt.t().serialize()),
                    residual: "0".into(),
                    detail: Some(detail),
                }],
            });
            finish(report, started, c)
        }
        Command::VerifyTheorem { family, points } => {
            let fam = parse_family(family, c)?;
            let cfg = cfg_for(fam.ctx(), c, *points, 8, None)?;
            let mut report = base_report(&fam, c);
            report.checks.push(checks::check_theorem(&fam, &cfg)?);
            finish(report, started, c)
        }
        Command::VerifyIdentities { q, draws } => {
            let qv = parse_rational(q)?;
            let ctx = match mode_of(c) {
                Mode::Exact => QContext::exact(qv)?,
                Mode::Float => QContext::float(qv, c.precision)?,
            };
            let cfg = cfg_for(&ctx, c, 0, 0, None)?;
            let mut report = Report::new(format!("q={q}"), mode_name(c), c.precision, c.seed);
            report.checks = checks::check_identities(&ctx, &cfg, *draws)?;
            finish(report, started, c)
        }
        Command::Polys { family, n_max } => {
            let fam = parse_family(family, c)?;
            let cfg = cfg_for(fam.ctx(), c, 0, 2 * n_max + 2, None)?;
            let mut report = base_report(&fam, c);
            report.checks.push(checks::polys_rows(&fam, &cfg, *n_max)?);
            finish(report, started, c)
        }
        Command::Pade { family, n_max } => {
            let fam = parse_family(family, c)?;
            let cfg = cfg_for(fam.ctx(), c, 0, 2 * n_max + 2, None)?;
            let mut report = base_report(&fam, c);
            report.checks.push(checks::pade_rows(&fam, &cfg, *n_max)?);
            finish(report, started, c)
        }
        Command::VerifyAll {
            family,
            points,
            k_max,
            draws,
            keep_going,
            perturb,
        } => {
            let fam = parse_family(family, c)?;
            let perturb = perturb.map(|p| match p {
                PerturbArg::Tau => Perturb::Tau,
                PerturbArg::Constant => Perturb::Constant,
                PerturbArg::Moment => Perturb::Moment,
            });
            let cfg = cfg_for(fam.ctx(), c, *points, *k_max, perturb)?;
            let mut report = base_report(&fam, c);
            report.checks = checks::verify_all(&fam, &cfg, *draws, *keep_going)?;
            finish(report, started, c)
        }
    }
}

fn base_report(fam: &FamilySpec, c: &Common) -> Report {
    Report::new(fam.descriptor(), mode_name(c), c.precision, c.seed)
}

fn finish(mut report: Report, started: Instant, c: &Common) -> Result<ExitCode> {
    report.elapsed_ms = started.elapsed().as_millis();
    emit(&report, c)
}
