//! Pilot schemes, the received training signal and MMSE channel estimation.

mod closed_form;
mod empirical;
mod estimator;
mod receive;
mod scheme;
mod table;

pub use closed_form::{
    error_cov_closed_form, gain_ratio, gain_ratio_puc_over_npuc, nmse, nmse_bounds, pilot_snr, uncombined_error_cov,
    ErrorCovariance, NmseBounds,
};
pub use empirical::{empirical_nmse, EmpiricalNmse};
pub use estimator::{interference_covariances, mmse_estimate, MmseEstimator};
pub use receive::{receive, Receiver};
pub use scheme::{build_scheme, dft_matrix, effective_pilot, Filter, PilotScheme};
pub use table::{min_pilot_count, Direction, Regime};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelError;
use crate::linalg::LinalgError;

/// Pilot transmission scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    /// Non-precoded pilots, uncombined reception.
    #[serde(rename = "nPuC")]
    NPuC,
    /// Precoded pilots, uncombined reception.
    #[serde(rename = "PuC")]
    PuC,
    /// Precoded pilots, combined reception.
    #[serde(rename = "PC")]
    PC,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::NPuC, Scenario::PuC, Scenario::PC];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::NPuC => "nPuC",
            Scenario::PuC => "PuC",
            Scenario::PC => "PC",
        }
    }

    /// Pilot length used when none is configured: the orthogonal lengths, and one symbol for PC.
    pub fn default_pilot_length(self, ue_count: usize, ue_antennas: usize, paths: usize) -> usize {
        match self {
            Scenario::NPuC => ue_count * ue_antennas,
            Scenario::PuC => ue_count * paths,
            Scenario::PC => 1,
        }
    }

    /// Checks a pilot length against the scenario's construction rule.
    pub fn check_pilot_length(
        self,
        t_tau: usize,
        ue_count: usize,
        ue_antennas: usize,
        paths: usize,
    ) -> Result<(), PilotError> {
        let ok = match self {
            Scenario::NPuC => t_tau == ue_count * ue_antennas,
            Scenario::PuC => t_tau == ue_count * paths,
            Scenario::PC => (1..=paths).contains(&t_tau),
        };
        if ok {
            return Ok(());
        }
        let required = match self {
            Scenario::NPuC => format!("K*N = {}", ue_count * ue_antennas),
            Scenario::PuC => format!("K*L = {}", ue_count * paths),
            Scenario::PC => format!("between 1 and L = {paths}"),
        };
        Err(PilotError::InvalidPilotLength {
            scenario: self,
            t_tau,
            required,
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = PilotError;

    fn from_str(s: &str) -> Result<Self, PilotError> {
        match s {
            "nPuC" | "npuc" | "NPuC" => Ok(Scenario::NPuC),
            "PuC" | "puc" => Ok(Scenario::PuC),
            "PC" | "pc" => Ok(Scenario::PC),
            other => Err(PilotError::UnknownScenario(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PilotError {
    #[error("pilot length {t_tau} is invalid for {scenario}: expected {required}")]
    InvalidPilotLength {
        scenario: Scenario,
        t_tau: usize,
        required: String,
    },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("{op} is not defined for {scenario}")]
    UnsupportedScenario { op: &'static str, scenario: Scenario },
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("UE index {index} out of range for {count} UEs")]
    UeIndex { index: usize, count: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Smallest noise variance accepted by the estimators.
pub const MIN_NOISE_VARIANCE: f64 = 1e-12;

pub(crate) fn check_noise(sigma_z_sq: f64) -> Result<(), PilotError> {
    if !(sigma_z_sq >= MIN_NOISE_VARIANCE) || !sigma_z_sq.is_finite() {
        return Err(PilotError::InvalidParameter(format!(
            "noise variance must be at least {MIN_NOISE_VARIANCE:e}, got {sigma_z_sq}"
        )));
    }
    Ok(())
}
