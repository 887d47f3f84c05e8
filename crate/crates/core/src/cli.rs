//! Command-line front end.
//!
//! Exit codes: `0` success, `1` invalid input, `2` numerical failure,
//! `64` missing or unknown subcommand.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::configuration::{annulus_area, LinkConfig};
use crate::error::{Error, Result};
use crate::estimators::{self, EstimatorKind, EstimatorValue};
use crate::hofer;
use crate::novikov::NovikovScalar;
use crate::par::{self, Exec};
use crate::profile::{random_piecewise_cubic, RadialProfile, TimeDepRadial};
use crate::rational::{q, ExtRational, Rational};
use crate::recurrence::{self, DifferenceSet, RotationModel};
use crate::superpotential::{self as sp, Branch};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "LAGCONF_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "lagconf",
    version,
    about = "Link configurations on the sphere: potentials, estimators, flats and recurrence"
)]
#[command(
    args_override_self = true,
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// File of `key=value` lines merged into the flags (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical point of the superpotential, refined to a given order.
    Superpotential(SuperpotentialArgs),
    /// Evaluate an estimator on a radial profile.
    Estimate(EstimateArgs),
    /// Convergence of the normalized estimator difference as k grows.
    TauConvergence(TauArgs),
    /// Lower bound for the flat generated by an even bump.
    Flat(FlatArgs),
    /// Asymptotic norm bounds for smoothed indicator profiles.
    Packing(PackingArgs),
    /// Difference sets, cliques and return times.
    #[command(subcommand)]
    Recurrence(RecurrenceCommand),
    /// Randomized axiom checks on the radial class.
    Axioms(AxiomArgs),
}

#[derive(Args, Debug)]
struct SuperpotentialArgs {
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long = "B", default_value = "2/5")]
    b: Rational,
    #[arg(long, default_value = "1/10")]
    a: Rational,
    /// Signs ε as a comma list, e.g. `1,-1`; default all `+1`.
    #[arg(long, allow_hyphen_values = true)]
    signs: Option<String>,
    /// Bulk parameter as `coeff@exponent` terms joined by `+`.
    #[arg(long, default_value = "0")]
    beta: String,
    /// Truncation order of the refinement.
    #[arg(long, default_value = "3/10")]
    order: Rational,
    /// Root index of the leading solution.
    #[arg(long)]
    root: Option<usize>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    q_sign: i8,
    /// Values of T for the numerical comparison, comma separated.
    #[arg(long, default_value = "1e-2,1e-3")]
    oracle_t: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Zeta0,
    Mu0,
    C0,
    Tau,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long = "B", default_value = "2/5")]
    b: Rational,
    /// Bump size; defaults to `(B - C)/2`.
    #[arg(long)]
    a: Option<Rational>,
    /// Second configuration for `tau`.
    #[arg(long, default_value_t = 1)]
    kp: u32,
    #[arg(long = "Bp", default_value = "1/2")]
    bp: Rational,
    #[arg(long, allow_hyphen_values = true)]
    profile: String,
}

#[derive(Args, Debug)]
struct TauArgs {
    #[arg(long = "B", default_value = "2/5")]
    b: Rational,
    #[arg(long, default_value = "poly:[0,1]@[0,1/2]", allow_hyphen_values = true)]
    profile: String,
    #[arg(long, default_value_t = 10_000)]
    k_max: u32,
}

#[derive(Args, Debug)]
struct FlatArgs {
    #[arg(long, default_value = "bump:0,1/10,1", allow_hyphen_values = true)]
    profile: String,
    #[arg(long, default_value = "1/40")]
    a: Rational,
    #[arg(long, default_value_t = 12)]
    approximants: u32,
}

#[derive(Args, Debug)]
struct PackingArgs {
    /// Radii as a comma list of rationals.
    #[arg(long, default_value = "3/10")]
    r: String,
    #[arg(long, default_value = "1/1000")]
    delta: Rational,
}

#[derive(Subcommand, Debug)]
enum RecurrenceCommand {
    /// Minimum complement density of clique-free difference sets.
    Enumerate {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 10)]
        window: u32,
    },
    /// Return-time densities of a circle rotation.
    Rotation {
        #[arg(long, default_value_t = std::f64::consts::SQRT_2 - 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
    },
    /// Density inequality for one difference set.
    Check {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        window: u32,
        /// Elements of the difference set, comma separated.
        #[arg(long)]
        set: String,
    },
}

#[derive(Args, Debug)]
struct AxiomArgs {
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long = "B", default_value = "2/5")]
    b: Rational,
    #[arg(long)]
    a: Option<Rational>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

const SUBCOMMANDS: [&str; 7] = [
    "superpotential",
    "estimate",
    "tau-convergence",
    "flat",
    "packing",
    "recurrence",
    "axioms",
];

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let raw: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let argv = match merge_config_file(raw) {
        Ok(v) => v,
        Err(e) => return report_error(&e),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                ErrorKind::UnknownArgument if !has_known_subcommand(&argv) => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return code;
        }
    };
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                return report_error(&Error::Parse(format!(
                    "{WORKERS_ENV} must be a positive integer, got {v:?}"
                )))
            }
        },
        Err(_) => None,
    };
    let outcome = par::with_workers(workers, || run(&cli));
    match outcome.and_then(|value| emit(&cli, &value)) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

fn has_known_subcommand(argv: &[String]) -> bool {
    argv.iter()
        .skip(1)
        .any(|a| SUBCOMMANDS.contains(&a.as_str()))
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

/// Inserts `--key value` pairs from the `--config` file right after the
/// subcommand path, so that later command-line flags override them.
fn merge_config_file(mut argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{path}:{}: expected key=value", n + 1)))?;
        extra.push(format!("--{}", key.trim()));
        extra.push(value.trim().to_string());
    }
    let Some(mut at) = argv.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(argv);
    };
    at += 1;
    if argv[at - 1] == "recurrence"
        && argv
            .get(at)
            .is_some_and(|s| ["enumerate", "rotation", "check"].contains(&s.as_str()))
    {
        at += 1;
    }
    argv.splice(at..at, extra);
    Ok(argv)
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))
}

fn run(cli: &Cli) -> Result<Value> {
    let exec = Exec::default();
    match &cli.command {
        Command::Superpotential(a) => run_superpotential(a),
        Command::Estimate(a) => run_estimate(a),
        Command::TauConvergence(a) => {
            let h: RadialProfile = a.profile.parse()?;
            to_value(&estimators::calabi_limit(a.b, &h, a.k_max, exec)?)
        }
        Command::Flat(a) => {
            let h: RadialProfile = a.profile.parse()?;
            to_value(&hofer::flat_lower_bound(&h, a.a, a.approximants)?)
        }
        Command::Packing(a) => {
            let rs = parse_list::<Rational>(&a.r)?;
            let rows = rs
                .into_iter()
                .map(|r| hofer::u_r(r, a.delta))
                .collect::<Result<Vec<_>>>()?;
            to_value(&rows)
        }
        Command::Recurrence(r) => run_recurrence(r, exec),
        Command::Axioms(a) => {
            let c = LinkConfig::new(a.k, a.b, a.a.map_or_else(|| default_a(a.k, a.b), Ok)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let samples: Vec<RadialProfile> = (0..a.samples)
                .map(|_| random_piecewise_cubic(&mut rng))
                .collect();
            to_value(&estimators::axiom_suite(&c, &samples, cli.seed, exec)?)
        }
    }
}

/// `(B - C)/2`, or `1/4` for a single circle.
fn default_a(k: u32, b: Rational) -> Result<Rational> {
    if k == 1 {
        return Ok(q(1, 4));
    }
    Ok((b - annulus_area(k, b)?) / Rational::from_int(2))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<T>()
                .map_err(|e| Error::Parse(format!("{x:?}: {e}")))
        })
        .collect()
}

/// `coeff@exponent` terms joined by `+`; `0` is the zero series.
fn parse_series(s: &str) -> Result<NovikovScalar> {
    if s.trim() == "0" {
        return Ok(NovikovScalar::zero());
    }
    let terms = s
        .split('+')
        .map(|t| {
            let (c, e) = t.trim().split_once('@').ok_or_else(|| {
                Error::Parse(format!("series term {t:?} must look like coeff@exponent"))
            })?;
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?;
            Ok((e.parse::<Rational>()?, Complex64::new(c, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NovikovScalar::from_terms(terms, ExtRational::Infinity))
}

#[derive(Serialize)]
struct OracleRow {
    t: f64,
    max_abs_error: f64,
    gradient_norm: f64,
}

#[derive(Serialize)]
struct SuperpotentialReport {
    config: LinkConfig,
    signs: Vec<i8>,
    branch: Branch,
    solved_order: Rational,
    p: Vec<NovikovScalar>,
    q: Vec<NovikovScalar>,
    residual_valuations: Vec<ExtRational>,
    oracle: Vec<OracleRow>,
}

fn run_superpotential(a: &SuperpotentialArgs) -> Result<Value> {
    let c = LinkConfig::new(a.k, a.b, a.a)?;
    let signs: Vec<i8> = match &a.signs {
        Some(s) => parse_list(s)?,
        None => vec![1; a.k as usize - 1],
    };
    let s = sp::build_superpotential(&c, &signs, parse_series(&a.beta)?)?;
    let branch = Branch {
        root_index: a.root,
        q_sign: a.q_sign,
    };
    let start = sp::leading_solution(&c, &signs, &branch)?;
    let point = sp::refine_critical_point(&s, &start, a.order)?;
    let mut oracle = Vec::new();
    for t in parse_list::<f64>(&a.oracle_t)? {
        let z = sp::solve_numeric_oracle_from(&s, &start, t)?;
        let series = point.eval_at(t);
        let err = z
            .iter()
            .zip(&series)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        let g = sp::NumericPotential::new(&s, t).gradient(&z);
        let gradient_norm = g.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        oracle.push(OracleRow {
            t,
            max_abs_error: err,
            gradient_norm,
        });
    }
    to_value(&SuperpotentialReport {
        config: c,
        signs,
        branch: point.branch.clone(),
        solved_order: point.solved_order,
        p: point.p,
        q: point.q,
        residual_valuations: point.residual_valuations,
        oracle,
    })
}

fn run_estimate(a: &EstimateArgs) -> Result<Value> {
    let h: RadialProfile = a.profile.parse()?;
    let config = || -> Result<LinkConfig> {
        LinkConfig::new(a.k, a.b, a.a.map_or_else(|| default_a(a.k, a.b), Ok)?)
    };
    let (value, kind) = match a.kind {
        Kind::Zeta0 => (estimators::zeta0(a.k, a.b, &h)?, EstimatorKind::Zeta0),
        Kind::Mu0 => (estimators::mu0(&config()?, &h), EstimatorKind::Mu0),
        Kind::C0 => (
            estimators::c0_timedep(&config()?, &TimeDepRadial::autonomous(h)),
            EstimatorKind::C0,
        ),
        Kind::Tau => (
            estimators::tau(a.k, a.b, a.kp, a.bp, &h)?,
            EstimatorKind::Tau,
        ),
    };
    to_value(&EstimatorValue {
        value,
        k: a.k,
        b: a.b,
        kind,
    })
}

fn run_recurrence(r: &RecurrenceCommand, exec: Exec) -> Result<Value> {
    match r {
        RecurrenceCommand::Enumerate { k, window } => {
            to_value(&recurrence::enumerate_and_verify(*k, *window, exec)?)
        }
        RecurrenceCommand::Rotation { alpha, r, n } => {
            let model = RotationModel::new(*alpha, *r)?;
            to_value(&recurrence::rotation_densities(&model, *n, exec))
        }
        RecurrenceCommand::Check { k, m, window, set } => {
            let d = DifferenceSet::new(parse_list::<u32>(set)?, *window)?;
            to_value(&recurrence::density_bound_check(&d, *k, *m))
        }
    }
}

fn emit(cli: &Cli, value: &Value) -> Result<()> {
    let text = match cli.format {
        Format::Json => {
            serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))? + "\n"
        }
        Format::Csv => to_csv(value),
    };
    match &cli.output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// One row per object (or per array element); nested values are JSON-encoded.
fn to_csv(value: &Value) -> String {
    let rows: Vec<&Value> = match value {
        Value::Array(items) => items.iter().collect(),
        other => vec![other],
    };
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        if let Value::Object(map) = row {
            for key in map.keys() {
                if !header.contains(key) {
                    header.push(key.clone());
                }
            }
        }
    }
    if header.is_empty() {
        return rows.iter().map(|v| csv_cell(v) + "\n").collect();
    }
    let mut out = header
        .iter()
        .map(|h| csv_cell(&Value::String(h.clone())))
        .collect::<Vec<_>>()
        .join(",")
        + "\n";
    for row in rows {
        let cells: Vec<String> = header
            .iter()
            .map(|h| row.get(h).map_or_else(String::new, csv_cell))
            .collect();
        out += &(cells.join(",") + "\n");
    }
    out
}
