//! Command-line front end for the period-finding laboratory.
//!
//! Four subcommands cover the workflow: `simulate` writes measurement
//! distributions and sampled readings, `recover` runs the continued-fraction
//! recovery loop end to end, `verify-appendix` checks the coprimality bounds
//! that govern the expected number of reading pairs, and `fourier` tabulates
//! lattice coefficients and reconstruction error.
//!
//! Machine output (CSV tables, JSON objects, JSON lines) goes to standard
//! output or the `--out` file; diagnostics go to standard error. Exit code 0
//! means success, 1 a usage or configuration error, and 2 an algorithmic
//! failure: recovery gave up, or a verified bound did not hold.

use std::collections::HashMap;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use periodlab::arith::{euler_phi, ratio_to_f64};
use periodlab::function::fourier::{fourier_transform, max_reconstruction_error};
use periodlab::function::{tabulated_from_csv, Period};
use periodlab::prob::{
    self, MonteCarloEstimate, ProbabilityReport, SIX_OVER_PI_SQUARED,
};
use periodlab::recovery::{
    recover_irrational_period, recover_rational_period, QMode, RecoveryConfig, SamplerMode,
};
use periodlab::sim::{
    apply_fourier, left_register_distribution, measure_observable, prepare_superposition,
    MeasurementOutcome, SimError,
};
use periodlab::{Distribution, PeriodicFn, Weights};

#[derive(Parser, Debug)]
#[command(name = "periodlab", version, arg_required_else_help = true)]
#[command(about = "Simulate and invert measurements of a hidden periodic function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a measurement distribution and optionally sample readings from it.
    Simulate(SimulateArgs),
    /// Recover the hidden period from simulated readings.
    Recover(RecoverArgs),
    /// Check the coprimality lower bounds behind the expected round count.
    #[command(name = "verify-appendix")]
    VerifyAppendix(VerifyArgs),
    /// Tabulate lattice coefficients or the reconstruction error curve.
    Fourier(FourierArgs),
}

/// Flags shared by every subcommand. Any long flag may also appear as a
/// `key = value` line in the `--config` file; explicit flags win.
#[derive(Args, Debug)]
struct CommonArgs {
    /// Seed for stochastic steps (defaults to 0; same seed, same output).
    #[arg(long)]
    seed: Option<u64>,

    /// Write the primary table or report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Flat `key = value` defaults file; `#` starts a comment.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Emit tables as JSON arrays instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Hidden function: sawtooth, triangle, square, constant, cosine, or csv:<path>.
    #[arg(long)]
    function: Option<String>,

    /// Period: integer `p`, fraction `a/b`, or surd `sqrt:d` / `sqrt:d*r`.
    #[arg(long)]
    period: Option<String>,

    /// Measurement model: `ideal` (frequency lattice) or `grid` (finite register).
    #[arg(long)]
    mode: Option<String>,

    /// Lattice window bound for the ideal model (default derived from the period).
    #[arg(long = "n-max", value_name = "N_MAX")]
    n_max: Option<u64>,

    /// Floor modulus for sampled readings: a positive integer or `auto`.
    #[arg(long = "Q", value_name = "Q")]
    q: Option<String>,

    /// Draw this many readings and print them as JSON lines.
    #[arg(long, value_name = "COUNT")]
    samples: Option<u64>,

    /// Grid samples per period (grid mode).
    #[arg(long = "M", value_name = "M")]
    samples_per_period: Option<usize>,

    /// Window length in periods (grid mode).
    #[arg(long = "W", value_name = "W")]
    window_periods: Option<usize>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    /// Hidden function: sawtooth, triangle, square, constant, cosine, or csv:<path>.
    #[arg(long)]
    function: Option<String>,

    /// Period: integer `p`, fraction `a/b`, or surd `sqrt:d` / `sqrt:d*r`.
    #[arg(long)]
    period: Option<String>,

    /// Floor modulus: a positive integer or `auto` (2·a² from the period bound).
    #[arg(long = "Q", value_name = "Q")]
    q: Option<String>,

    /// Lattice window bound for the ideal sampler.
    #[arg(long = "n-max", value_name = "N_MAX")]
    n_max: Option<u64>,

    /// Give up after this many reading pairs (default 25).
    #[arg(long = "max-iters", value_name = "COUNT")]
    max_iters: Option<usize>,

    /// Target interval width for irrational periods; forces interval output.
    #[arg(long)]
    precision: Option<f64>,

    /// Where readings come from: `ideal` (default) or `grid`.
    #[arg(long)]
    mode: Option<String>,

    /// Grid samples per period (grid mode).
    #[arg(long = "M", value_name = "M")]
    samples_per_period: Option<usize>,

    /// Window length in periods (grid mode).
    #[arg(long = "W", value_name = "W")]
    window_periods: Option<usize>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Denominator whose coprimality statistics are checked.
    #[arg(long = "a", value_name = "A")]
    a: Option<u64>,

    /// Draws are uniform over 1..=N.
    #[arg(long = "N", value_name = "N")]
    n: Option<u64>,

    /// Enumerate all pairs exactly instead of sampling.
    #[arg(long)]
    exhaustive: bool,

    /// Monte Carlo sample count (default 100000; ignored with --exhaustive).
    #[arg(long, value_name = "COUNT")]
    trials: Option<u64>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct FourierArgs {
    /// Function: sawtooth, triangle, square, constant, cosine, or csv:<path>.
    #[arg(long)]
    function: Option<String>,

    /// Period: integer `p`, fraction `a/b`, or surd `sqrt:d` / `sqrt:d*r`.
    #[arg(long)]
    period: Option<String>,

    /// Tabulate coefficients for |n| up to this bound.
    #[arg(long = "n-max", value_name = "N_MAX")]
    n_max: Option<u64>,

    /// Emit the reconstruction error curve instead of the coefficient table.
    #[arg(long)]
    curve: bool,

    #[command(flatten)]
    common: CommonArgs,
}

/// A usage or configuration problem; exits with code 1. Algorithmic
/// failures still print their payload and map to exit code 2 at the call
/// site instead of routing through this type.
struct Failure(String);

fn usage<E: Display>(err: E) -> Failure {
    Failure(err.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Recover(args) => cmd_recover(args),
        Command::VerifyAppendix(args) => cmd_verify(args),
        Command::Fourier(args) => cmd_fourier(args),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

// ---------------------------------------------------------------------------
// Config file merging

/// Key-value defaults loaded from `--config`. Keys are spelled exactly like
/// the long flags they stand in for; unknown keys are ignored so one file
/// can serve several subcommands.
struct ConfigMap(HashMap<String, String>);

impl ConfigMap {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(ConfigMap(HashMap::new()));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure(format!(
                    "{} line {}: expected `key = value`",
                    path.display(),
                    index + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigMap(map))
    }

    /// Fill `slot` from the file when the flag was not given.
    fn fill<T: FromStr>(&self, slot: &mut Option<T>, key: &str) -> Result<(), Failure>
    where
        T::Err: Display,
    {
        if slot.is_none() {
            if let Some(raw) = self.0.get(key) {
                let value = raw
                    .parse::<T>()
                    .map_err(|e| Failure(format!("config key `{key}`: {e}")))?;
                *slot = Some(value);
            }
        }
        Ok(())
    }

    /// Boolean flags merge monotonically: either side can switch them on.
    fn fill_flag(&self, slot: &mut bool, key: &str) -> Result<(), Failure> {
        if let Some(raw) = self.0.get(key) {
            let value = raw
                .parse::<bool>()
                .map_err(|e| Failure(format!("config key `{key}`: {e}")))?;
            *slot = *slot || value;
        }
        Ok(())
    }
}

fn fill_common(common: &mut CommonArgs, cfg: &ConfigMap) -> Result<(), Failure> {
    cfg.fill(&mut common.seed, "seed")?;
    cfg.fill(&mut common.out, "out")?;
    cfg.fill_flag(&mut common.json, "json")
}

// ---------------------------------------------------------------------------
// Shared argument resolution

fn parse_period(text: Option<&str>) -> Result<Period, Failure> {
    let text = text.unwrap_or("1");
    Period::parse(text).map_err(|e| Failure(format!("period `{text}`: {e}")))
}

fn build_function(name: Option<&str>, period: Period) -> Result<PeriodicFn, Failure> {
    let name = name.ok_or_else(|| Failure("--function is required".into()))?;
    let built = match name {
        "sawtooth" => PeriodicFn::sawtooth(period),
        "triangle" => PeriodicFn::triangle(period),
        "square" => PeriodicFn::square(period, 0.0, 1.0),
        "constant" => PeriodicFn::constant(period, 1.0),
        "cosine" => PeriodicFn::trig_polynomial(period, 0.0, vec![1.0], vec![]),
        other => match other.strip_prefix("csv:") {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure(format!("{path}: {e}")))?;
                tabulated_from_csv(&text, period)
            }
            None => {
                return Err(Failure(format!(
                    "unknown function `{other}` (expected sawtooth, triangle, square, \
                     constant, cosine, or csv:<path>)"
                )))
            }
        },
    };
    built.map_err(usage)
}

/// `--Q` for sampling: `auto` (or absent) resolves to the period's default
/// modulus, anything else must be a positive integer.
fn resolve_modulus(text: Option<&str>, period: &Period) -> Result<u64, Failure> {
    match text {
        None | Some("auto") => period
            .default_modulus()
            .to_string()
            .parse::<u64>()
            .map_err(|_| Failure("default modulus exceeds u64".into())),
        Some(raw) => raw
            .parse::<u64>()
            .map_err(|_| Failure(format!("Q `{raw}`: expected a positive integer or auto"))),
    }
}

fn resolve_q_mode(text: Option<&str>) -> Result<QMode, Failure> {
    match text {
        None | Some("auto") => Ok(QMode::Auto),
        Some(raw) => raw
            .parse::<u64>()
            .map(QMode::Fixed)
            .map_err(|_| Failure(format!("Q `{raw}`: expected a positive integer or auto"))),
    }
}

fn write_payload(out: &Option<PathBuf>, payload: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, payload).map_err(|e| Failure(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(payload)
            .map_err(|e| Failure(format!("stdout: {e}"))),
    }
}

// ---------------------------------------------------------------------------
// JSON building blocks

/// Integers print as JSON numbers when they fit i64 and as decimal strings
/// beyond that, so nothing silently loses precision.
fn int_value(x: &BigInt) -> Value {
    let text = x.to_string();
    match text.parse::<i64>() {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(text),
    }
}

fn exact_json(r: &BigRational) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("numer".into(), Value::from(r.numer().to_string()));
    obj.insert("denom".into(), Value::from(r.denom().to_string()));
    Value::Object(obj)
}

fn estimate_json(mc: &MonteCarloEstimate) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("estimate".into(), Value::from(mc.estimate));
    obj.insert("std_error".into(), Value::from(mc.std_error));
    obj.insert("trials".into(), Value::from(mc.trials));
    Value::Object(obj)
}

fn bound_json(
    value: f64,
    lower_bound: f64,
    satisfied: bool,
    exact: Option<&BigRational>,
    estimate: Option<&MonteCarloEstimate>,
) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("value".into(), Value::from(value));
    obj.insert("lower_bound".into(), Value::from(lower_bound));
    obj.insert("satisfied".into(), Value::from(satisfied));
    obj.insert("exact".into(), exact.map(exact_json).unwrap_or(Value::Null));
    obj.insert(
        "estimate".into(),
        estimate.map(estimate_json).unwrap_or(Value::Null),
    );
    Value::Object(obj)
}

fn outcome_line(outcome: &MeasurementOutcome) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("m".into(), int_value(&outcome.m));
    obj.insert("Q".into(), Value::from(outcome.q));
    if let Some(n) = outcome.lattice_index {
        obj.insert("n".into(), Value::from(n));
    }
    Value::Object(obj).to_string()
}

fn sample_lines<F>(count: u64, seed: u64, mut draw: F) -> Result<String, Failure>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<MeasurementOutcome, SimError>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = String::new();
    for _ in 0..count {
        let outcome = draw(&mut rng).map_err(usage)?;
        lines.push_str(&outcome_line(&outcome));
        lines.push('\n');
    }
    Ok(lines)
}

// ---------------------------------------------------------------------------
// simulate

fn weights_payload(table: &Weights, json: bool) -> Result<Vec<u8>, Failure> {
    if json {
        let rows: Vec<Value> = table
            .entries()
            .iter()
            .map(|(n, w)| {
                let mut obj = serde_json::Map::new();
                obj.insert("n".into(), Value::from(*n));
                obj.insert("weight".into(), Value::from(*w));
                Value::Object(obj)
            })
            .collect();
        let mut text = Value::from(rows).to_string();
        text.push('\n');
        Ok(text.into_bytes())
    } else {
        let mut buf = Vec::new();
        table.write_csv(&mut buf).map_err(usage)?;
        Ok(buf)
    }
}

fn distribution_payload(dist: &Distribution, json: bool) -> Result<Vec<u8>, Failure> {
    if json {
        let rows: Vec<Value> = dist
            .points()
            .iter()
            .map(|p| {
                let mut obj = serde_json::Map::new();
                obj.insert("k".into(), Value::from(p.k));
                obj.insert("y_numer".into(), int_value(p.y.numer()));
                obj.insert("y_denom".into(), int_value(p.y.denom()));
                obj.insert("probability".into(), Value::from(p.probability));
                Value::Object(obj)
            })
            .collect();
        let mut text = Value::from(rows).to_string();
        text.push('\n');
        Ok(text.into_bytes())
    } else {
        let mut buf = Vec::new();
        dist.write_csv(&mut buf).map_err(usage)?;
        Ok(buf)
    }
}

fn cmd_simulate(mut args: SimulateArgs) -> Result<ExitCode, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.fill(&mut args.function, "function")?;
    cfg.fill(&mut args.period, "period")?;
    cfg.fill(&mut args.mode, "mode")?;
    cfg.fill(&mut args.n_max, "n-max")?;
    cfg.fill(&mut args.q, "Q")?;
    cfg.fill(&mut args.samples, "samples")?;
    cfg.fill(&mut args.samples_per_period, "M")?;
    cfg.fill(&mut args.window_periods, "W")?;
    fill_common(&mut args.common, &cfg)?;

    let period = parse_period(args.period.as_deref())?;
    let f = build_function(args.function.as_deref(), period)?;
    let seed = args.common.seed.unwrap_or(0);
    let mode = args
        .mode
        .as_deref()
        .ok_or_else(|| Failure("--mode is required (ideal or grid)".into()))?;

    let (payload, samples) = match mode {
        "ideal" => {
            let n_max = args.n_max.unwrap_or_else(|| f.period().default_n_max());
            let table = Weights::build(&f, n_max).map_err(usage)?;
            let payload = weights_payload(&table, args.common.json)?;
            let samples = match args.samples {
                Some(count) => {
                    let q = resolve_modulus(args.q.as_deref(), f.period())?;
                    Some(sample_lines(count, seed, |rng| {
                        table.sample_outcome(f.period(), q, rng)
                    })?)
                }
                None => None,
            };
            (payload, samples)
        }
        "grid" => {
            let m = args
                .samples_per_period
                .ok_or_else(|| Failure("--M is required in grid mode".into()))?;
            let w = args
                .window_periods
                .ok_or_else(|| Failure("--W is required in grid mode".into()))?;
            let state = apply_fourier(&prepare_superposition(&f, m, w).map_err(usage)?);
            let dist = left_register_distribution(&state).map_err(usage)?;
            let payload = distribution_payload(&dist, args.common.json)?;
            let samples = match args.samples {
                Some(count) => {
                    let q = resolve_modulus(args.q.as_deref(), f.period())?;
                    Some(sample_lines(count, seed, |rng| {
                        measure_observable(&dist, q, rng)
                    })?)
                }
                None => None,
            };
            (payload, samples)
        }
        other => {
            return Err(Failure(format!(
                "unknown mode `{other}` (expected ideal or grid)"
            )))
        }
    };

    // With --samples the readings own standard output; the table still goes
    // to --out when one was requested.
    match samples {
        Some(lines) => {
            if args.common.out.is_some() {
                write_payload(&args.common.out, &payload)?;
            }
            std::io::stdout()
                .write_all(lines.as_bytes())
                .map_err(|e| Failure(format!("stdout: {e}")))?;
        }
        None => write_payload(&args.common.out, &payload)?,
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// recover

fn cmd_recover(mut args: RecoverArgs) -> Result<ExitCode, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.fill(&mut args.function, "function")?;
    cfg.fill(&mut args.period, "period")?;
    cfg.fill(&mut args.q, "Q")?;
    cfg.fill(&mut args.n_max, "n-max")?;
    cfg.fill(&mut args.max_iters, "max-iters")?;
    cfg.fill(&mut args.precision, "precision")?;
    cfg.fill(&mut args.mode, "mode")?;
    cfg.fill(&mut args.samples_per_period, "M")?;
    cfg.fill(&mut args.window_periods, "W")?;
    fill_common(&mut args.common, &cfg)?;

    let period = parse_period(args.period.as_deref())?;
    let f = build_function(args.function.as_deref(), period)?;

    let mut config: RecoveryConfig<f64> = RecoveryConfig::new(args.common.seed.unwrap_or(0));
    config.q = resolve_q_mode(args.q.as_deref())?;
    config.n_max = args.n_max;
    if let Some(max_iters) = args.max_iters {
        config.max_iterations = max_iters;
    }
    config.sampler = match args.mode.as_deref().unwrap_or("ideal") {
        "ideal" => SamplerMode::Ideal,
        "grid" => SamplerMode::Grid {
            samples_per_period: args
                .samples_per_period
                .ok_or_else(|| Failure("--M is required in grid mode".into()))?,
            window_periods: args
                .window_periods
                .ok_or_else(|| Failure("--W is required in grid mode".into()))?,
        },
        other => {
            return Err(Failure(format!(
                "unknown mode `{other}` (expected ideal or grid)"
            )))
        }
    };

    // A surd period forces interval output; an explicit --precision requests
    // it even when the period is rational.
    let result = if f.period().is_rational() && args.precision.is_none() {
        recover_rational_period(&f, &config).map_err(usage)?
    } else {
        let precision = args.precision.unwrap_or(1e-4);
        recover_irrational_period(&f, precision, &config).map_err(usage)?
    };

    let mut payload = result.to_json().to_string();
    payload.push('\n');
    write_payload(&args.common.out, payload.as_bytes())?;
    if result.period.is_some() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("recovery gave up after {} reading pairs", result.iterations);
        Ok(ExitCode::from(2))
    }
}

// ---------------------------------------------------------------------------
// verify-appendix

fn cmd_verify(mut args: VerifyArgs) -> Result<ExitCode, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.fill(&mut args.a, "a")?;
    cfg.fill(&mut args.n, "N")?;
    cfg.fill(&mut args.trials, "trials")?;
    cfg.fill_flag(&mut args.exhaustive, "exhaustive")?;
    fill_common(&mut args.common, &cfg)?;

    let a = args.a.ok_or_else(|| Failure("--a is required".into()))?;
    let n = args.n.ok_or_else(|| Failure("--N is required".into()))?;
    let seed = args.common.seed.unwrap_or(0);

    // The single-draw and squared bounds are rational on both sides, so they
    // are checked by exact cross-multiplication in every mode.
    let p1 = prob::prob_coprime(a, n).map_err(usage)?;
    let p2 = prob::prob_pair_coprime_to_a(a, n).map_err(usage)?;
    let phi = euler_phi(a).map_err(usage)?;
    let count = prob::count_coprime(a, n);
    let single_ok = (count as u128) * (a as u128) >= (phi as u128) * (n as u128);
    let phi_ratio = phi as f64 / a as f64;

    let mut bounds = serde_json::Map::new();
    bounds.insert(
        "single_coprime".into(),
        bound_json(ratio_to_f64(&p1), phi_ratio, single_ok, Some(&p1), None),
    );
    // Squaring both sides preserves the exact comparison.
    bounds.insert(
        "pair_coprime".into(),
        bound_json(
            ratio_to_f64(&p2),
            phi_ratio * phi_ratio,
            single_ok,
            Some(&p2),
            None,
        ),
    );

    let (mode_label, trials_value) = if args.exhaustive {
        let p3 = prob::prob_pairwise_coprime_given(a, n).map_err(usage)?;
        let v3 = ratio_to_f64(&p3);
        let ok3 = v3 >= SIX_OVER_PI_SQUARED - 1e-12;
        bounds.insert(
            "pairwise_coprime_given".into(),
            bound_json(v3, SIX_OVER_PI_SQUARED, ok3, Some(&p3), None),
        );
        let report = ProbabilityReport::exhaustive_condition_a(a, n).map_err(usage)?;
        let exact = report
            .exact_probability
            .as_ref()
            .expect("exhaustive reports carry the exact probability");
        bounds.insert(
            "condition_a".into(),
            bound_json(
                ratio_to_f64(exact),
                report.lower_bound,
                report.bound_satisfied,
                Some(exact),
                None,
            ),
        );
        ("exhaustive", Value::Null)
    } else {
        let trials = args.trials.unwrap_or(100_000);
        let report = prob::monte_carlo_condition_a(a, n, trials, seed).map_err(usage)?;
        let joint = report
            .monte_carlo_estimate
            .expect("sampled reports carry an estimate");
        // Conditioning on the exactly known pair-coprime probability turns
        // the joint estimate into one for the conditional bound.
        let p2f = ratio_to_f64(&p2);
        let conditional = MonteCarloEstimate {
            estimate: joint.estimate / p2f,
            std_error: joint.std_error / p2f,
            trials: joint.trials,
        };
        let ok3 =
            conditional.estimate >= SIX_OVER_PI_SQUARED - 3.0 * conditional.std_error;
        bounds.insert(
            "pairwise_coprime_given".into(),
            bound_json(
                conditional.estimate,
                SIX_OVER_PI_SQUARED,
                ok3,
                None,
                Some(&conditional),
            ),
        );
        bounds.insert(
            "condition_a".into(),
            bound_json(
                joint.estimate,
                report.lower_bound,
                report.bound_satisfied,
                None,
                Some(&joint),
            ),
        );
        ("monte-carlo", Value::from(trials))
    };

    let all_satisfied = bounds
        .values()
        .all(|entry| entry["satisfied"] == Value::Bool(true));

    let mut root = serde_json::Map::new();
    root.insert("a".into(), Value::from(a));
    root.insert("N".into(), Value::from(n));
    root.insert("mode".into(), Value::from(mode_label));
    root.insert("trials".into(), trials_value);
    root.insert("bounds".into(), Value::Object(bounds));
    root.insert("all_satisfied".into(), Value::from(all_satisfied));

    let mut payload = Value::Object(root).to_string();
    payload.push('\n');
    write_payload(&args.common.out, payload.as_bytes())?;
    if all_satisfied {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("at least one bound failed for a = {a}, N = {n}");
        Ok(ExitCode::from(2))
    }
}

// ---------------------------------------------------------------------------
// fourier

fn cmd_fourier(mut args: FourierArgs) -> Result<ExitCode, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.fill(&mut args.function, "function")?;
    cfg.fill(&mut args.period, "period")?;
    cfg.fill(&mut args.n_max, "n-max")?;
    cfg.fill_flag(&mut args.curve, "curve")?;
    fill_common(&mut args.common, &cfg)?;

    let period = parse_period(args.period.as_deref())?;
    let f = build_function(args.function.as_deref(), period)?;
    let n_max = args.n_max.unwrap_or_else(|| f.period().default_n_max());

    let payload = if args.curve {
        // Window bounds double up to n_max, giving the error curve a few
        // points per decade without re-running quadrature needlessly.
        let mut terms: Vec<u64> = Vec::new();
        let mut t = 1;
        while t < n_max {
            terms.push(t);
            t *= 2;
        }
        terms.push(n_max);
        let mut rows = Vec::with_capacity(terms.len());
        for n_terms in terms {
            let comb = fourier_transform(&f, n_terms as i64).map_err(usage)?;
            let error = max_reconstruction_error(&f, &comb, 512);
            rows.push((n_terms, error));
        }
        if args.common.json {
            let values: Vec<Value> = rows
                .iter()
                .map(|(n_terms, error)| {
                    let mut obj = serde_json::Map::new();
                    obj.insert("n_terms".into(), Value::from(*n_terms));
                    obj.insert("max_error".into(), Value::from(*error));
                    Value::Object(obj)
                })
                .collect();
            let mut text = Value::from(values).to_string();
            text.push('\n');
            text.into_bytes()
        } else {
            let mut text = String::from("n_terms,max_error\n");
            for (n_terms, error) in rows {
                text.push_str(&format!("{n_terms},{error}\n"));
            }
            text.into_bytes()
        }
    } else {
        let comb = fourier_transform(&f, n_max as i64).map_err(usage)?;
        if args.common.json {
            let values: Vec<Value> = comb
                .entries()
                .iter()
                .map(|(n, c)| {
                    let mut obj = serde_json::Map::new();
                    obj.insert("n".into(), Value::from(*n));
                    obj.insert("re".into(), Value::from(c.re));
                    obj.insert("im".into(), Value::from(c.im));
                    obj.insert("abs".into(), Value::from(c.norm()));
                    Value::Object(obj)
                })
                .collect();
            let mut text = Value::from(values).to_string();
            text.push('\n');
            text.into_bytes()
        } else {
            let mut buf = Vec::new();
            comb.write_csv(&mut buf).map_err(usage)?;
            buf
        }
    };

    write_payload(&args.common.out, &payload)?;
    Ok(ExitCode::SUCCESS)
}
