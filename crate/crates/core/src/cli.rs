//! The `axdiv` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::bound_report;
use crate::error::{Error, Result};
use crate::ffcount::{build_field, count_report};
use crate::harness::{density_estimate, dwork_verify, envelope, to_csv, verify, write_corpus};
use crate::hasse::{evaluate_at_variety, hasse_polynomial, homogeneity_report};
use crate::lattice::minimal_data;
use crate::representations::{admissible_primes, conditional_number, default_theta};
use crate::support::VarietySpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Inclusive prime window `LO..HI`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
}

impl FromStr for PrimeRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u64 = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
        let hi: u64 = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(PrimeRange { lo, hi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "axdiv", version, about = "p-divisibility bounds and point-count verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Variety description (JSON).
    spec: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ax–Katz, Moreno–Moreno and Adolphson–Sperber bounds.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = 1)]
        a: u32,
    },
    /// Counts, Hasse values and the sharpness congruence over a prime window.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "5..31")]
        primes: PrimeRange,
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long)]
        theta: Option<u64>,
    },
    /// Share of sharp primes in a window (an estimate).
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "2..100")]
        primes: PrimeRange,
        #[arg(long)]
        theta: Option<u64>,
    },
    /// Denominator set, sparsity criterion and conditional number.
    Conditional {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta: Option<u64>,
        #[arg(long, default_value = "2..100")]
        primes: PrimeRange,
    },
    /// The Hasse polynomial modulo a prime.
    Hasse {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        a: u32,
    },
    /// Exact point count over F_{p^a}.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        a: u32,
    },
    /// Truncated Dwork trace formula against the exact count.
    Dwork {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        prime: u64,
        /// p-adic precision; defaults to T + n + r + 2.
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, default_value_t = 2)]
        truncation: u64,
        /// Perturb one trace entry (self-test; expected to mismatch).
        #[arg(long)]
        corrupt: bool,
    },
    /// Seeded random variety descriptions.
    Corpus {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        count: usize,
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// Rendered output plus whether every mathematical check passed.
struct Outcome {
    text: String,
    pass: bool,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input { .. }
        | Error::Io(_)
        | Error::InvalidArgument(_)
        | Error::NotPrime(_)
        | Error::UnsupportedDegree(..)
        | Error::GuardExceeded { .. }
        | Error::NonUnitCoefficient { .. }
        | Error::DivisibleByPrime { .. }
        | Error::Precision(_) => EXIT_INPUT,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Parses arguments, runs one command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return exit_code(&e);
    }
    match execute(cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text.as_bytes());
            if outcome.pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("AXDIV_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("AXDIV_THREADS must be a positive integer, got {value:?}")))?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn load(path: &PathBuf) -> Result<VarietySpec> {
    let text = std::fs::read_to_string(path)?;
    VarietySpec::from_json_str(&text).map_err(|e| match e {
        Error::Input { path: inner, kind } => Error::Input { path: format!("{}:{inner}", path.display()), kind },
        other => other,
    })
}

fn render<T: Serialize>(command: &str, report: &T, format: Format, rows: Vec<Value>, text: String) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope(command, report)).expect("reports serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => to_csv(&rows),
        Format::Text => Ok(text),
    }
}

fn as_row<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Bounds { common, prime, a } => {
            let spec = load(&common.spec)?;
            let report = bound_report(spec.system(), prime, a)?;
            let mut text = String::new();
            let _ = writeln!(text, "n = {}, r = {}, degrees = {:?}", report.n, report.r, report.degrees);
            let _ = writeln!(text, "Ax-Katz: {} (raw {})", report.ax_katz, report.ax_katz_raw);
            if let (Some(p), Some(mm)) = (report.prime, &report.moreno_moreno) {
                let _ = writeln!(text, "Moreno-Moreno (p = {p}, a = {a}): {mm}");
            }
            let _ = writeln!(text, "mu = {} (polytope), {} (subset pairs)", report.mu_polytope, report.mu_combinatorial);
            let _ = writeln!(text, "w = {}", report.w_polytope);
            let rows = vec![as_row(&report)];
            Ok(Outcome { text: render("bounds", &report, common.format, rows, text)?, pass: true })
        }
        Command::Verify { common, primes, a, theta } => {
            let spec = load(&common.spec)?;
            let ps: Vec<u64> = (primes.lo..=primes.hi).collect();
            let report = verify(&spec, &ps, a, theta)?;
            let mut text = format!("mu = {}, a = {}, theta = {}, D = {:?}\n", report.mu, a, report.theta, report.denominators);
            for r in &report.records {
                match &r.skipped {
                    Some(reason) => {
                        let _ = writeln!(text, "p = {:>3}: skipped ({reason})", r.p);
                    }
                    None => {
                        let _ = writeln!(
                            text,
                            "p = {:>3}{}: count = {}, ord_q = {}, H = {}, count/q^mu = {}, congruence {}, sharp {}",
                            r.p,
                            if r.admissible { "" } else { " (not admissible)" },
                            r.count.unwrap_or_default(),
                            r.ord_q.as_ref().map(ToString::to_string).unwrap_or_default(),
                            r.hasse_value.unwrap_or_default(),
                            r.quotient_residue.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                            if r.congruence == Some(true) { "ok" } else { "FAILED" },
                            r.observed_sharp == Some(true),
                        );
                    }
                }
            }
            let _ = writeln!(text, "failures: {} (informative: {})", report.failures, report.informative_failures);
            let rows = report.records.iter().map(as_row).collect();
            let pass = report.pass();
            Ok(Outcome { text: render("verify", &report, common.format, rows, text)?, pass })
        }
        Command::Density { common, primes, theta } => {
            let spec = load(&common.spec)?;
            let est = density_estimate(&spec, primes.lo, primes.hi, theta)?;
            let text = format!(
                "estimate over primes in {}..{}: sharp {} of admissible ({:.3}), admissible {} of tested\n",
                primes.lo, primes.hi, est.sharp_fraction, est.sharp_fraction_value, est.admissible_fraction
            );
            let rows = vec![as_row(&est)];
            Ok(Outcome { text: render("density", &est, common.format, rows, text)?, pass: true })
        }
        Command::Conditional { common, theta, primes } => {
            let spec = load(&common.spec)?;
            let report = conditional_number(spec.system())?;
            let theta = theta.unwrap_or_else(|| default_theta(spec.system()));
            let admissible: Vec<u64> =
                admissible_primes(&report.denominators, theta, primes.hi).into_iter().filter(|&p| p >= primes.lo).collect();
            let prediction = match report.predicted_hasse_value() {
                Some(0) => "no prediction (c = 0)".to_string(),
                Some(h) => format!("sharp for all large p; H_p(a) = {h} mod p"),
                None => "undefined".to_string(),
            };
            let mut text = format!("D = {:?}\nsparsity criterion: {}\n", report.denominators, report.sparsity);
            let _ = writeln!(text, "c = {}", report.c_value.map(|c| c.to_string()).unwrap_or_else(|| "undefined".into()));
            let _ = writeln!(text, "prediction: {prediction}");
            for w in &report.fiber_dimension_warnings {
                let _ = writeln!(text, "warning: {w}");
            }
            let payload = json!({
                "report": report,
                "theta": theta,
                "admissible_primes": admissible,
                "prediction": prediction,
            });
            let rows = report.multiplicities.iter().map(as_row).collect();
            Ok(Outcome { text: render("conditional", &payload, common.format, rows, text)?, pass: true })
        }
        Command::Hasse { common, prime, a } => {
            let spec = load(&common.spec)?;
            let h = hasse_polynomial(spec.system(), prime, a)?;
            let homogeneity = homogeneity_report(&h);
            let value = if spec.coprime_to(prime) { Some(evaluate_at_variety(&h.poly, &spec)?) } else { None };
            let blocks: Vec<Value> = h
                .blocks
                .iter()
                .map(|b| json!({"pair": b.pair.to_string(), "weight": b.weight, "polynomial": b.poly.to_canonical_string()}))
                .collect();
            let payload = json!({
                "p": prime,
                "a": a,
                "polynomial": h.poly.to_canonical_string(),
                "blocks": blocks,
                "blocks_overlap": h.blocks_overlap,
                "homogeneity": homogeneity,
                "value": value,
            });
            let mut text = format!("H = {}\n", h.poly);
            for b in &h.blocks {
                let _ = writeln!(text, "  {} (w = {}): {}", b.pair, b.weight, b.poly);
            }
            let _ = writeln!(text, "homogeneity: {}", if homogeneity.pass { "pass" } else { "FAILED" });
            if let Some(v) = value {
                let _ = writeln!(text, "H(a) = {v} mod {prime}");
            }
            Ok(Outcome { text: render("hasse", &payload, common.format, blocks, text)?, pass: homogeneity.pass })
        }
        Command::Count { common, prime, a } => {
            let spec = load(&common.spec)?;
            build_field(prime, a)?;
            let mu = minimal_data(spec.system())?.mu;
            let report = count_report(&spec, prime, a, mu)?;
            let text = format!(
                "|V(F_{})| = {}, ord_q = {}, mu = {}, sharp = {}\n",
                report.q, report.count, report.ord_q, report.mu, report.sharp
            );
            let rows = vec![as_row(&report)];
            Ok(Outcome { text: render("count", &report, common.format, rows, text)?, pass: true })
        }
        Command::Dwork { common, prime, precision, truncation, corrupt } => {
            let spec = load(&common.spec)?;
            let s = spec.system();
            let m = precision.unwrap_or((truncation + (s.n() + s.r()) as u64 + 2) as u32);
            let verdict = dwork_verify(&spec, prime, m, truncation, corrupt)?;
            let text = format!(
                "trace formula: {} mod {} (slack {}), count: {} = {} mod {}, {}\n",
                verdict.trace.residue,
                verdict.trace.window,
                verdict.trace.slack,
                verdict.count,
                verdict.count_residue,
                verdict.trace.window,
                if verdict.matches { "match" } else { "MISMATCH" }
            );
            let rows = vec![json!({
                "p": prime,
                "precision": m,
                "truncation": truncation,
                "slack": verdict.trace.slack,
                "window": verdict.trace.window,
                "trace_residue": verdict.trace.residue,
                "count": verdict.count,
                "count_residue": verdict.count_residue,
                "matches": verdict.matches,
            })];
            let pass = verdict.matches;
            Ok(Outcome { text: render("dwork", &verdict, common.format, rows, text)?, pass })
        }
        Command::Corpus { seed, count, out, format } => {
            let paths = write_corpus(&out, seed, count)?;
            let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
            let payload = json!({ "seed": seed, "count": count, "files": names });
            let text = names.iter().map(|n| format!("{n}\n")).collect();
            let rows = names.iter().map(|n| json!({ "seed": seed, "file": n })).collect();
            Ok(Outcome { text: render("corpus", &payload, format, rows, text)?, pass: true })
        }
    }
}
