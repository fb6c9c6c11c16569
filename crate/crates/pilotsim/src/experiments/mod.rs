//! Seeded sweep runners, configuration and CSV output.

pub mod config;
mod output;
mod runners;
mod table;

pub use config::{resolve_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use output::{write_csv, Metric, ResultRow, SweepPoint, CSV_HEADER};
pub use runners::{
    run_contamination_sweep, run_nmse_sweep, run_scaling_sweep, run_tradeoff_sweep, ANGLE_STREAM, DRAW_STREAM,
    NOISE_VARIANCE,
};
pub use table::{format_pilot_table, pilot_table, write_pilot_table_csv, PilotTableEntry};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::pilot::PilotError;
use crate::rate::RateError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Pilot(#[from] PilotError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    pub fn is_config(&self) -> bool {
        matches!(self, ExperimentError::Config(_))
    }
}

/// What a runner produced.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Rows(Vec<ResultRow>),
    Table(Vec<PilotTableEntry>),
}

/// Dispatches on the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, ExperimentError> {
    Ok(match cfg.experiment {
        ExperimentKind::NmseSweep => RunOutput::Rows(run_nmse_sweep(cfg)?),
        ExperimentKind::Tradeoff => RunOutput::Rows(run_tradeoff_sweep(cfg)?),
        ExperimentKind::Scaling => RunOutput::Rows(run_scaling_sweep(cfg)?),
        ExperimentKind::Contamination => RunOutput::Rows(run_contamination_sweep(cfg)?),
        ExperimentKind::PilotTable => {
            cfg.validate()?;
            RunOutput::Table(pilot_table(cfg))
        }
    })
}

impl RunOutput {
    /// CSV bytes: result rows, or the pilot table in its own layout.
    pub fn to_csv(&self) -> Result<Vec<u8>, ExperimentError> {
        let mut out = Vec::new();
        match self {
            RunOutput::Rows(rows) => write_csv(rows, &mut out)?,
            RunOutput::Table(entries) => write_pilot_table_csv(entries, &mut out)?,
        }
        Ok(out)
    }
}
