use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ks_core::diagnostics::{lambda_fn, m_star};
use ks_core::harness::{
    convergence_table, drive, emit_summary, emit_timeseries, numbered, parse_config, sweep,
    ConvergenceRow, RunConfig,
};

/// Keller–Segel finite-volume runs and diagnostics.
#[derive(Parser)]
#[command(name = "ks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write timeseries.csv and summary.json.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Refinement levels for the residual convergence table.
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Run every configuration matching a glob, one directory per run.
    Sweep {
        pattern: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pilot run, then Λ(0⁺) and θ from the measured suprema.
    Theta { config: PathBuf },
    /// Critical mean density m*(n).
    Mstar {
        #[arg(long)]
        n: u32,
    },
}

enum Failure {
    Config(String),
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Run(m) => m,
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn run_err(e: impl std::fmt::Display) -> Failure {
    Failure::Run(e.to_string())
}

fn simulate(config: &Path, out: &Path, levels: usize) -> Result<(), Failure> {
    let cfg = load(config)?;
    let record = drive(&cfg).map_err(run_err)?;
    let mut table = vec![ConvergenceRow::of(&record)];
    if levels > 1 {
        let finer =
            convergence_table(&ks_core::harness::refined(&cfg, 1), levels - 1).map_err(run_err)?;
        table.extend(finer);
    }
    fs::create_dir_all(out).map_err(run_err)?;
    emit_timeseries(&record, &out.join("timeseries.csv")).map_err(run_err)?;
    emit_summary(&record, table, &out.join("summary.json")).map_err(run_err)?;
    println!(
        "{:?} at t = {} after {} steps, max u {}",
        record.outcome, record.final_t, record.steps, record.u_max_reached
    );
    Ok(())
}

fn run_sweep(pattern: &str, out: &Path) -> Result<(), Failure> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| Failure::Config(e.to_string()))?
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Config(e.to_string()))?;
    paths.sort();
    let mut runs = Vec::with_capacity(paths.len());
    for p in &paths {
        runs.push(load(p)?);
    }
    let entries = sweep(&numbered(runs), out).map_err(run_err)?;
    let failed = entries
        .iter()
        .filter(|e| e.outcome.starts_with("failed"))
        .count();
    println!(
        "{} runs, {} failed; index at {}",
        entries.len(),
        failed,
        out.join("index.csv").display()
    );
    Ok(())
}

fn theta(config: &Path) -> Result<(), Failure> {
    let cfg = load(config)?;
    if !cfg.spec.is_integrable() {
        return Err(Failure::Config("θ needs an integrable diffusivity".into()));
    }
    let record = drive(&cfg).map_err(run_err)?;
    let b = record
        .majorant
        .as_ref()
        .expect("integrable runs build a majorant");
    let mut lam = lambda_fn(cfg.mass(), cfg.q, cfg.tau, b, &record.bounds).map_err(run_err)?;
    lam.exponent = cfg.lambda_exponent;
    let theta = record.theta().expect("majorant present").map_err(run_err)?;
    let report = serde_json::json!({
        "pilot_outcome": record.outcome,
        "c1": record.bounds.c1,
        "c2": record.bounds.c2,
        "r_max": b.r_max(),
        "lambda_at_zero": lam.at_zero(),
        "theta": theta,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializes")
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            out,
            levels,
        } => simulate(&config, &out, levels),
        Command::Sweep { pattern, out } => run_sweep(&pattern, &out),
        Command::Theta { config } => theta(&config),
        Command::Mstar { n } => m_star(n)
            .map(|m| println!("{m:.16e}"))
            .map_err(|e| Failure::Config(e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
