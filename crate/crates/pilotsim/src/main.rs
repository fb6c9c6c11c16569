use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use pilotsim::experiments::config::{parse_override, read_document};
use pilotsim::experiments::{format_pilot_table, resolve_config, run, ExperimentError, ExperimentKind, RunOutput};

#[derive(Parser)]
#[command(
    name = "pilotsim",
    version,
    about = "Pilot scheme sweeps: NMSE, sum rate and pilot counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and Monte Carlo NMSE with bounds.
    NmseSweep(RunArgs),
    /// Spectral efficiency against the pilot share of a fixed energy budget.
    Tradeoff(RunArgs),
    /// Optimal pilot share and peak spectral efficiency against array size.
    Scaling(RunArgs),
    /// PC NMSE against the number of UEs.
    Contamination(RunArgs),
    /// Minimum pilot counts per scenario, direction and regime.
    PilotTable(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; every field has a default.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout if neither this nor the config's output is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Dotted key and value, e.g. `energy.rho_tau=10 dB`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

fn execute(kind: ExperimentKind, args: RunArgs) -> Result<(), Failure> {
    let config_err = |e: pilotsim::experiments::ConfigError| Failure::Config(e.to_string());
    let doc = match &args.config {
        Some(p) => read_document(p).map_err(config_err)?,
        None => Value::Object(Default::default()),
    };
    let mut overrides = args
        .overrides
        .iter()
        .map(|o| parse_override(o))
        .collect::<Result<Vec<_>, _>>()
        .map_err(config_err)?;
    if let Some(seed) = args.seed {
        overrides.push(("mc.seed".into(), seed.into()));
    }
    if let Some(w) = args.workers {
        overrides.push(("workers".into(), w.into()));
    }
    if let Some(out) = &args.out {
        overrides.push(("output".into(), Value::String(out.display().to_string())));
    }
    let cfg = resolve_config(doc, kind, &overrides).map_err(config_err)?;
    let result = run(&cfg)?;
    if let RunOutput::Table(entries) = &result {
        print!("{}", format_pilot_table(entries));
        if cfg.output.is_none() {
            return Ok(());
        }
    }
    let bytes = result.to_csv()?;
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| Failure::Numeric(format!("writing {}: {e}", path.display())))?;
            if let RunOutput::Rows(rows) = &result {
                let secs: f64 = rows.iter().map(|r| r.wall_time.as_secs_f64()).sum();
                eprintln!(
                    "{} rows written to {} ({secs:.1} s of compute)",
                    rows.len(),
                    path.display()
                );
            }
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Failure::Numeric(format!("writing stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::NmseSweep(a) => (ExperimentKind::NmseSweep, a),
        Command::Tradeoff(a) => (ExperimentKind::Tradeoff, a),
        Command::Scaling(a) => (ExperimentKind::Scaling, a),
        Command::Contamination(a) => (ExperimentKind::Contamination, a),
        Command::PilotTable(a) => (ExperimentKind::PilotTable, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
