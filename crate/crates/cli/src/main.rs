//! `tentspace`: run aperture experiments from the command line and write
//! CSV/JSON reports.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use tentspace::experiments::{run_experiment, ExperimentKind, Preset, RunConfig};
use tentspace::Exponent;

#[derive(Parser)]
#[command(name = "tentspace", version, about = "Tent-space aperture experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment; exits 0 only if every assertion row passes.
    Run(RunArgs),
    /// List the available experiments.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment name, e.g. a1-sweep (see `tentspace list`).
    #[arg(long)]
    experiment: Option<String>,
    /// Spatial dimension.
    #[arg(long = "n")]
    dim: Option<usize>,
    /// Integrability exponent: a positive real or "inf". Overrides the
    /// experiment's built-in p list.
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated apertures, overriding the built-in list.
    #[arg(long)]
    alphas: Option<String>,
    /// Weight exponent for grand-square experiments.
    #[arg(long)]
    lambda: Option<f64>,
    /// Grid resolution tier: fast, standard, or slow.
    #[arg(long = "grid-preset")]
    grid_preset: Option<String>,
    /// Seed for the random ensembles.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for <experiment>.csv and <experiment>.json reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// TOML counterpart of the run flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    n: Option<usize>,
    p: Option<String>,
    alphas: Option<Vec<f64>>,
    lambda: Option<f64>,
    grid_preset: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

fn parse_alphas(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad aperture {tok:?}"))
        })
        .collect()
}

fn run(args: RunArgs) -> Result<bool, String> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let experiment = args
        .experiment
        .or(file.experiment)
        .ok_or("missing --experiment (or an `experiment` key in --config)")?;
    let mut cfg = RunConfig::new(
        ExperimentKind::from_str(&experiment).map_err(|e| e.to_string())?,
    );
    cfg.dim = args.dim.or(file.n).unwrap_or(1);
    if let Some(p) = args.p.or(file.p) {
        cfg.p = Some(Exponent::from_str(&p).map_err(|e| e.to_string())?);
    }
    cfg.alphas = match args.alphas {
        Some(s) => Some(parse_alphas(&s)?),
        None => file.alphas,
    };
    cfg.lambda = args.lambda.or(file.lambda);
    if let Some(preset) = args.grid_preset.or(file.grid_preset) {
        cfg.preset = Preset::from_str(&preset).map_err(|e| e.to_string())?;
    }
    cfg.seed = args.seed.or(file.seed).unwrap_or(0);

    if let Some(jobs) = args.jobs.or(file.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }

    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;

    if let Some(dir) = args.out.or(file.out) {
        fs::create_dir_all(&dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        let csv = dir.join(format!("{}.csv", report.name));
        fs::write(&csv, report.to_csv()).map_err(|e| format!("write {}: {e}", csv.display()))?;
        let json = dir.join(format!("{}.json", report.name));
        let body = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        fs::write(&json, body).map_err(|e| format!("write {}: {e}", json.display()))?;
    }

    let failed = report.rows.iter().filter(|r| !r.pass).count();
    println!(
        "{}: {} rows, {} failed, preset {}, n = {}, seed {} -> {}",
        report.name,
        report.rows.len(),
        failed,
        report.preset,
        report.dim,
        report.seed,
        if report.passed { "PASS" } else { "FAIL" }
    );
    for row in report.rows.iter().filter(|r| !r.pass) {
        println!(
            "  fail: p = {}, alpha = {}, norm = {:.6e}, tolerance = {:.3e}",
            row.p, row.alpha, row.norm, row.tolerance
        );
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::List => {
            for kind in ExperimentKind::all() {
                println!("{kind}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Run(args) => match run(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::FAILURE,
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
    }
}
