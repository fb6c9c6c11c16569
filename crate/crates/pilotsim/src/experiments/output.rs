//! Result rows and their CSV form.

use std::fmt;
use std::io::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::ExperimentKind;
use crate::pilot::Scenario;

pub const CSV_HEADER: [&str; 15] = [
    "experiment",
    "scenario",
    "M",
    "N",
    "L",
    "K",
    "T_tau",
    "rho_tau",
    "rho_d",
    "metric",
    "value",
    "value_db",
    "std_error",
    "trials",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    NmseClosed,
    NmseEmpirical,
    NmseLower,
    NmseUpper,
    SpectralEfficiency,
    OptimalRhoBar,
    MaxSpectralEfficiency,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::NmseClosed => "nmse_closed",
            Metric::NmseEmpirical => "nmse_empirical",
            Metric::NmseLower => "nmse_lower",
            Metric::NmseUpper => "nmse_upper",
            Metric::SpectralEfficiency => "spectral_efficiency",
            Metric::OptimalRhoBar => "optimal_rho_bar",
            Metric::MaxSpectralEfficiency => "max_spectral_efficiency",
        }
    }

    pub fn is_nmse(self) -> bool {
        matches!(
            self,
            Metric::NmseClosed | Metric::NmseEmpirical | Metric::NmseLower | Metric::NmseUpper
        )
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sweep coordinates shared by every metric of one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub scenario: Scenario,
    pub bs_antennas: usize,
    pub ue_antennas: usize,
    pub paths: usize,
    pub ue_count: usize,
    pub pilot_length: usize,
    pub rho_tau: f64,
    /// Only set for data-phase experiments.
    pub rho_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub point: SweepPoint,
    pub metric: Metric,
    pub value: f64,
    pub std_error: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Summed compute time of the point's jobs. Not written to CSV so output stays reproducible.
    pub wall_time: Duration,
}

impl ResultRow {
    /// `10 log10(value)` for NMSE metrics.
    pub fn value_db(&self) -> Option<f64> {
        self.metric.is_nmse().then(|| 10.0 * self.value.log10())
    }

    pub fn record(&self) -> [String; 15] {
        let p = &self.point;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.experiment.name().to_string(),
            p.scenario.name().to_string(),
            p.bs_antennas.to_string(),
            p.ue_antennas.to_string(),
            p.paths.to_string(),
            p.ue_count.to_string(),
            p.pilot_length.to_string(),
            p.rho_tau.to_string(),
            opt(p.rho_d),
            self.metric.name().to_string(),
            self.value.to_string(),
            opt(self.value_db()),
            opt(self.std_error),
            self.trials.to_string(),
            self.seed.to_string(),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], sink: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}
