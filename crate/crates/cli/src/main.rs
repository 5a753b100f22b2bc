//! `cavispin` — run coupled-cavity spin-chain scenarios and compare outputs.
//!
//! Commands:
//! - `run <config>` — validate and propagate a TOML scenario, write CSV + JSON
//! - `builtin <name>` — run a shipped scenario (fig2a, fig2b, coeffs, trotter-sweep, zz-conserve)
//! - `compare <csv1> <csv2> <channel>` — deviation between two runs on one grid
//! - `validate <config>` — print the regime report without propagating
//!
//! Exit status: 0 on success, 2 when validation fails, 3 on a numeric abort
//! or a comparison above `--tolerance`, 1 for any other error.

use std::{
    fs,
    path::{Path, PathBuf},
    process::ExitCode,
};

use anyhow::{Context, Result};
use cavispin::{
    compare_series, compute_xy_coefficients, run_scenario,
    scenario::{builtin, default_trotter_sweep, validate_scenario, Builtin, RunOptions, BUILTINS},
    validate_xy_params, Error, ModelParams, RunRecord, Scenario, Status, TimeSeries, ValidationThresholds,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavispin", version, about = "Coupled-cavity five-level atoms and their effective spin-1 chains")]
struct Cli {
    /// Directory for outputs with relative paths.
    #[arg(long, global = true, env = "CAVISPIN_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Validate and run a TOML scenario.
    Run {
        config: PathBuf,
        /// CSV path; defaults to the scenario's `output` or `<name>.csv`.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Run even when the regime validation fails.
        #[arg(long)]
        allow_invalid: bool,
    },
    /// Run a shipped scenario.
    Builtin {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(BUILTINS))]
        name: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        allow_invalid: bool,
    },
    /// Compare one channel of two CSV outputs sampled on the same grid.
    Compare {
        csv1: PathBuf,
        csv2: PathBuf,
        channel: String,
        /// Channel name in the second file, if different.
        #[arg(long)]
        channel_b: Option<String>,
        /// Exit with status 3 when the max deviation exceeds this.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Print the regime validation report of a scenario.
    Validate { config: PathBuf },
}

enum Outcome {
    Ok,
    ValidationFailed,
    NumericAbort,
}

fn resolve(output_dir: Option<&Path>, path: &Path) -> PathBuf {
    match output_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn print_reports(record_reports: &[cavispin::scenario::NamedReport]) {
    for r in record_reports {
        println!("[{}]\n{}", r.parameters, r.report);
    }
}

fn run(scenario: &Scenario, output: Option<PathBuf>, output_dir: Option<&Path>, allow_invalid: bool) -> Result<Outcome> {
    let record: RunRecord = match run_scenario(scenario, RunOptions { allow_invalid }) {
        Ok(r) => r,
        Err(Error::ValidationFailed(report)) => {
            eprintln!("validation failed (use --allow-invalid to run anyway):\n{report}");
            return Ok(Outcome::ValidationFailed);
        }
        Err(e @ Error::StepUnderflow { .. }) => {
            eprintln!("numeric abort: {e}");
            return Ok(Outcome::NumericAbort);
        }
        Err(e) => return Err(e.into()),
    };
    if record.validation_status() != Status::Pass {
        print_reports(&record.validation);
    }
    let default = scenario.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", scenario.name)));
    let csv = resolve(output_dir, &output.unwrap_or(default));
    let sidecar = record.write(&csv).with_context(|| format!("writing {}", csv.display()))?;
    for (model, route) in &record.routes {
        println!("{model}: {route}");
    }
    println!("wrote {} and {} ({:.2} s)", csv.display(), sidecar.display(), record.wall_clock_seconds);
    Ok(Outcome::Ok)
}

fn coefficients() -> Result<Outcome> {
    let p = ModelParams::fig2();
    let c = compute_xy_coefficients(&p)?;
    println!("A = {:.4}\nB = {:.4}\nC = {:.4}", c.a_coef, c.b_coef, c.c_coef);
    println!("mu+ = {:?}, mu- = {:?}", c.mu_plus, c.mu_minus);
    println!("{}", validate_xy_params(&p, &ValidationThresholds::default())?);
    Ok(Outcome::Ok)
}

fn trotter_sweep(output: Option<PathBuf>, output_dir: Option<&Path>) -> Result<Outcome> {
    let sweep = default_trotter_sweep()?;
    println!("T = {:?}, alpha = {}, beta = {}", sweep.total_time, sweep.zz.alpha, sweep.zz.beta);
    for p in &sweep.points {
        println!("dt = {:.6e}  steps = {:>4}  error = {:.6e}", p.dt, p.n_steps, p.error);
    }
    println!("log-log slope = {:.4}", sweep.slope);
    let csv = resolve(output_dir, &output.unwrap_or_else(|| "trotter-sweep.csv".into()));
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    sweep.write_csv(fs::File::create(&csv)?)?;
    println!("wrote {}", csv.display());
    Ok(Outcome::Ok)
}

fn compare(csv1: &Path, csv2: &Path, channel: &str, channel_b: Option<&str>, tolerance: Option<f64>) -> Result<Outcome> {
    let read = |p: &Path| -> Result<TimeSeries> {
        Ok(TimeSeries::read_csv(fs::File::open(p).with_context(|| format!("opening {}", p.display()))?)?)
    };
    let (a, b) = (read(csv1)?, read(csv2)?);
    let d = compare_series(&a, channel, &b, channel_b.unwrap_or(channel))?;
    println!("max_abs = {:?}\nmean_abs = {:?}\nt_at_max = {:?}", d.max_abs, d.mean_abs, d.t_at_max);
    Ok(match tolerance {
        Some(tol) if d.max_abs > tol => {
            eprintln!("max deviation {:e} exceeds tolerance {tol:e}", d.max_abs);
            Outcome::NumericAbort
        }
        _ => Outcome::Ok,
    })
}

fn validate(config: &Path) -> Result<Outcome> {
    let scenario = Scenario::load(config).with_context(|| format!("loading {}", config.display()))?;
    let reports = validate_scenario(&scenario)?;
    print_reports(&reports);
    let worst = reports.iter().map(|r| r.report.overall).max().unwrap_or(Status::Pass);
    Ok(if worst == Status::Fail { Outcome::ValidationFailed } else { Outcome::Ok })
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let dir = cli.output_dir.as_deref();
    match cli.command {
        Commands::Run { config, output, allow_invalid } => {
            let scenario = Scenario::load(&config).with_context(|| format!("loading {}", config.display()))?;
            run(&scenario, output, dir, allow_invalid)
        }
        Commands::Builtin { name, output, allow_invalid } => match builtin(&name)? {
            Builtin::Run(s) => run(&s, output, dir, allow_invalid),
            Builtin::Coefficients => coefficients(),
            Builtin::TrotterSweep => trotter_sweep(output, dir),
        },
        Commands::Compare { csv1, csv2, channel, channel_b, tolerance } => {
            compare(&csv1, &csv2, &channel, channel_b.as_deref(), tolerance)
        }
        Commands::Validate { config } => validate(&config),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(2),
        Ok(Outcome::NumericAbort) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
