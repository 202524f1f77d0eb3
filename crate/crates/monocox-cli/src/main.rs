//! Command-line front end: estimation on CSV data, simulation campaigns,
//! limit-law sampling, and a fast self-check battery.
//!
//! Exit codes: 0 success, 1 self-check violation, 2 parse or configuration
//! error, 3 estimation error.

mod selfcheck;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monocox::estimators::{
    grenander_density, grenander_hazard, npmle_hazard, MonotoneEstimate, Shape,
};
use monocox::lab::{chernoff_sample, run_experiment, ExperimentSpec};
use monocox::{breslow_lambda, fit_beta, CoxOptions, CsvSchema, SurvivalSample};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 2;
const EXIT_ESTIMATION: u8 = 3;

#[derive(Parser)]
#[command(name = "monocox", about = "Shape-constrained baseline estimation in the Cox model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a monotone baseline estimator (or the cumulative hazard) to a CSV
    /// file with columns time,status,z1..zp.
    Fit(FitArgs),
    /// Run a Monte Carlo experiment campaign from a JSON spec.
    Simulate(SimulateArgs),
    /// Sample the limit law (argmin of two-sided Brownian motion plus a
    /// parabola) on a grid.
    Chernoff(ChernoffArgs),
    /// Run the invariant battery (duality, switching, envelope distance) on
    /// internally generated data.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Increasing,
    Decreasing,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Shape {
        match s {
            ShapeArg::Increasing => Shape::Nondecreasing,
            ShapeArg::Decreasing => Shape::Nonincreasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    Npmle,
    Grenander,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Hazard,
    Density,
    Cumhaz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtendArg {
    Last,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "hazard")]
    target: TargetArg,
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    #[arg(long, value_enum, default_value = "npmle")]
    estimator: EstimatorArg,
    /// Clamp the estimate to its last value beyond the data range (adds an
    /// open-ended final row to the CSV).
    #[arg(long, value_enum)]
    extend: Option<ExtendArg>,
    /// Output path prefix; writes <prefix>.csv and <prefix>.json.
    #[arg(long, default_value = "fit_output")]
    output: PathBuf,
    /// Restrict output to one format instead of writing both.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Report file (JSON).
    #[arg(long, default_value = "report.json")]
    output: PathBuf,
    /// Optional per-replicate error table (CSV).
    #[arg(long)]
    errors_csv: Option<PathBuf>,
}

#[derive(Args)]
struct ChernoffArgs {
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    #[arg(long, default_value_t = 2.0)]
    halfwidth: f64,
    #[arg(long, default_value_t = 0.005)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional CSV of the draws (one per line).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 13)]
    seed: u64,
    /// Test hook: inject a known fault and verify the battery catches it.
    #[arg(long)]
    inject: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Fit(args) => cmd_fit(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Chernoff(args) => cmd_chernoff(&args),
        Command::Selfcheck(args) => selfcheck::run(args.seed, args.inject.as_deref()),
    };
    ExitCode::from(code)
}

fn fail(code: u8, message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    code
}

fn cmd_fit(args: &FitArgs) -> u8 {
    let shape: Shape = args.shape.map(Shape::from).unwrap_or(match args.target {
        TargetArg::Density => Shape::Nonincreasing,
        _ => Shape::Nondecreasing,
    });
    if args.target == TargetArg::Density {
        if args.estimator == EstimatorArg::Npmle {
            return fail(EXIT_PARSE, "not supported: the constrained MLE of a decreasing density");
        }
        if shape == Shape::Nondecreasing {
            return fail(EXIT_PARSE, "not supported: density estimation with an increasing shape");
        }
    }
    let sample = match SurvivalSample::load_csv(&args.input, &CsvSchema::default()) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    if sample.event_count() == 0 {
        return fail(EXIT_ESTIMATION, "no events");
    }
    let fit = if sample.p() == 0 {
        None
    } else {
        match fit_beta(&sample, &CoxOptions::default()) {
            Ok(f) => Some(f),
            Err(e) => return fail(EXIT_ESTIMATION, e),
        }
    };
    let beta: Vec<f64> = fit.as_ref().map(|f| f.beta_hat.clone()).unwrap_or_default();

    let mut meta = serde_json::json!({
        "command": "fit",
        "n": sample.n(),
        "events": sample.event_count(),
        "ties": sample.tie_count(),
        "beta": beta,
        "loglik": fit.as_ref().map(|f| f.loglik),
        "iterations": fit.as_ref().map(|f| f.iterations),
        "converged": fit.as_ref().map(|f| f.converged),
    });

    let csv_path = args.output.with_extension("csv");
    let json_path = args.output.with_extension("json");
    let write_csv = args.format != Some(FormatArg::Json);
    let write_json = args.format != Some(FormatArg::Csv);

    let csv_text = match args.target {
        TargetArg::Cumhaz => {
            let lambda = match breslow_lambda(&sample, &beta) {
                Ok(l) => l,
                Err(e) => return fail(EXIT_ESTIMATION, e),
            };
            meta["target"] = "cumhaz".into();
            meta["estimate"] = serde_json::to_value(&lambda).expect("serializes");
            let mut text = String::from("x,value\n");
            for (x, v) in lambda.breakpoints().iter().zip(lambda.values()) {
                text.push_str(&format!("{x},{v}\n"));
            }
            text
        }
        TargetArg::Hazard | TargetArg::Density => {
            let est: Result<MonotoneEstimate, _> = match (args.target, args.estimator) {
                (TargetArg::Hazard, EstimatorArg::Npmle) => npmle_hazard(&sample, &beta, shape),
                (TargetArg::Hazard, EstimatorArg::Grenander) => {
                    grenander_hazard(&sample, &beta, shape)
                }
                (TargetArg::Density, _) => grenander_density(&sample, &beta),
                (TargetArg::Cumhaz, _) => unreachable!(),
            };
            let est = match est {
                Ok(e) => e,
                Err(e) => return fail(EXIT_ESTIMATION, e),
            };
            meta["method"] = serde_json::to_value(est.method).unwrap();
            meta["target"] = serde_json::to_value(est.target).unwrap();
            meta["shape"] = serde_json::to_value(est.shape).unwrap();
            meta["domain_end"] = est.domain_end.into();
            meta["estimate"] = serde_json::to_value(&est.estimate).expect("serializes");
            let mut text = String::from("interval_start,interval_end,value\n");
            for (a, b, v) in est.intervals() {
                text.push_str(&format!("{a},{b},{v}\n"));
            }
            if args.extend == Some(ExtendArg::Last) {
                let last = est.evaluate_extended(est.domain_end);
                text.push_str(&format!("{},inf,{last}\n", est.domain_end));
            }
            text
        }
    };

    if write_csv {
        if let Err(e) = std::fs::write(&csv_path, csv_text) {
            return fail(EXIT_PARSE, e);
        }
    }
    if write_json {
        let pretty = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        if let Err(e) = std::fs::write(&json_path, pretty) {
            return fail(EXIT_PARSE, e);
        }
    }
    println!(
        "fit: n={} events={} beta={:?} -> {}",
        sample.n(),
        sample.event_count(),
        beta,
        args.output.display()
    );
    EXIT_OK
}

fn cmd_simulate(args: &SimulateArgs) -> u8 {
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    let spec: ExperimentSpec = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_PARSE, format!("bad spec: {e}")),
    };
    let report = match run_experiment(&spec) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_PARSE, format!("bad spec: {e}")),
    };
    if let Err(e) = std::fs::write(&args.output, report.to_json()) {
        return fail(EXIT_PARSE, e);
    }
    if let Some(path) = &args.errors_csv {
        if let Err(e) = report.write_rows_csv(path) {
            return fail(EXIT_PARSE, e);
        }
    }
    println!("n,rmse,rate_ratio,ks_vs_chernoff,excluded");
    for (i, s) in report.summaries.iter().enumerate() {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        let ratio = if i == 0 {
            "-".to_string()
        } else {
            fmt(report.rate_ratios[i - 1].rmse_ratio)
        };
        println!(
            "{},{},{},{},{}",
            s.n,
            fmt(s.rmse_raw),
            ratio,
            fmt(s.ks_vs_chernoff),
            s.excluded
        );
    }
    eprintln!("runtime: {:.2}s", report.runtime_seconds);
    EXIT_OK
}

fn cmd_chernoff(args: &ChernoffArgs) -> u8 {
    let sample = match chernoff_sample(args.halfwidth, args.step, args.reps, args.seed) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    if let Some(path) = &args.output {
        let mut text = String::from("draw\n");
        for d in &sample.draws {
            text.push_str(&format!("{d}\n"));
        }
        if let Err(e) = std::fs::write(path, text) {
            return fail(EXIT_PARSE, e);
        }
    }
    println!(
        "chernoff: reps={} mean={:.6} sd={:.6}",
        sample.draws.len(),
        sample.mean(),
        sample.sd()
    );
    EXIT_OK
}
