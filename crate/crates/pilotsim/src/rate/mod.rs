//! Data phase: eigen precoders, effective noise and the sum-rate lower bound.

mod precoder;
mod sum_rate;
mod zeff;

pub use precoder::{data_precoder, factored_precoder, transmit_covariance};
pub use sum_rate::{asymptotic_rate_bound, sum_rate_mc, RateEvaluator, RateResult};
pub use zeff::{error_interference, zeff_covariance, zeff_covariance_factored};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::pilot::PilotError;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("invalid data-phase configuration: {0}")]
    InvalidConfig(String),
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error(transparent)]
    Pilot(#[from] PilotError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Energy and timing of the uplink data phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPhaseConfig<T> {
    rho_d: T,
    data_length: usize,
    coherence_length: usize,
    sigma_z_sq: T,
    streams: usize,
}

impl<T: Real> DataPhaseConfig<T> {
    pub fn new(
        rho_d: T,
        data_length: usize,
        coherence_length: usize,
        sigma_z_sq: T,
        streams: usize,
    ) -> Result<Self, RateError> {
        if data_length == 0 || data_length > coherence_length {
            return Err(RateError::InvalidConfig(format!(
                "data length {data_length} must be in 1..={coherence_length}"
            )));
        }
        if !(rho_d >= T::zero()) || !rho_d.is_finite() {
            return Err(RateError::InvalidConfig(format!(
                "data energy {rho_d} must be finite and non-negative"
            )));
        }
        if !(sigma_z_sq > T::zero()) || !sigma_z_sq.is_finite() {
            return Err(RateError::InvalidConfig(format!(
                "noise variance {sigma_z_sq} must be positive"
            )));
        }
        if streams == 0 {
            return Err(RateError::InvalidConfig("at least one stream per UE".into()));
        }
        Ok(Self {
            rho_d,
            data_length,
            coherence_length,
            sigma_z_sq,
            streams,
        })
    }

    /// Data length is whatever the pilot leaves of the coherence block.
    pub fn after_pilots(
        rho_d: T,
        coherence_length: usize,
        pilot_length: usize,
        sigma_z_sq: T,
        streams: usize,
    ) -> Result<Self, RateError> {
        if pilot_length >= coherence_length {
            return Err(RateError::InvalidConfig(format!(
                "pilot length {pilot_length} leaves no data symbols in a block of {coherence_length}"
            )));
        }
        Self::new(
            rho_d,
            coherence_length - pilot_length,
            coherence_length,
            sigma_z_sq,
            streams,
        )
    }

    pub fn rho_d(&self) -> T {
        self.rho_d
    }

    pub fn data_length(&self) -> usize {
        self.data_length
    }

    pub fn coherence_length(&self) -> usize {
        self.coherence_length
    }

    pub fn sigma_z_sq(&self) -> T {
        self.sigma_z_sq
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    /// `T_d / T_c`.
    pub fn data_fraction(&self) -> T {
        T::lit(self.data_length as f64) / T::lit(self.coherence_length as f64)
    }

    /// Energy per data symbol `ρ_d / T_d`.
    pub fn symbol_energy(&self) -> T {
        self.rho_d / T::lit(self.data_length as f64)
    }
}
