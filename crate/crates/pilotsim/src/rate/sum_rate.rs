//! Monte Carlo sum-rate lower bound and its large-array limit.
//!
//! All per-UE quantities live in the L-dimensional path domain. With `B = [B_1 … B_K]`,
//! `Ψ = blkdiag(Ψ_k)` and `Δ = blkdiag(d_k)`,
//! `log det(I + R_zeff⁻¹ S) = log det(I + (Ψ + ΔΔᴴ) BᴴB / σ²) − log det(I + Ψ BᴴB / σ²)`.

use num_complex::Complex;
use rand::Rng;

use super::{error_interference, factored_precoder, DataPhaseConfig, RateError};
use crate::channel::{sample_gains, ChannelStats};
use crate::linalg::{log_det, thin_qr, ComplexMatrix, ThinQr};
use crate::pilot::{error_cov_closed_form, ErrorCovariance, MmseEstimator, PilotScheme, Receiver};
use crate::random::Moments;
use crate::Real;

/// Sample mean of the spectral efficiency in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult<T> {
    pub spectral_efficiency: T,
    pub trials: usize,
    pub std_error: T,
}

/// Everything about one angle realization that stays fixed across fading draws.
#[derive(Debug, Clone)]
pub struct RateEvaluator<T> {
    config: DataPhaseConfig<T>,
    receiver: Receiver<T>,
    estimators: Vec<MmseEstimator<T>>,
    errors: Vec<ErrorCovariance<T>>,
    ue_qr: Vec<ThinQr<T>>,
    bs_grams: Vec<ComplexMatrix<T>>,
    stacked_gram: ComplexMatrix<T>,
    gain_variances: Vec<T>,
}

impl<T: Real> RateEvaluator<T> {
    pub fn new(
        scheme: &PilotScheme<T>,
        stats: &[ChannelStats<T>],
        config: DataPhaseConfig<T>,
    ) -> Result<Self, RateError> {
        let sigma = config.sigma_z_sq();
        if config.data_length() + scheme.pilot_length() != config.coherence_length() {
            return Err(RateError::InvalidConfig(format!(
                "data length {} plus pilot length {} differs from block length {}",
                config.data_length(),
                scheme.pilot_length(),
                config.coherence_length()
            )));
        }
        let ues = scheme.ue_count();
        let receiver = Receiver::new(scheme, stats)?;
        let estimators = (0..ues)
            .map(|k| MmseEstimator::new(scheme, stats, sigma, k))
            .collect::<Result<Vec<_>, _>>()?;
        let errors = (0..ues)
            .map(|k| error_cov_closed_form(scheme, stats, sigma, k))
            .collect::<Result<Vec<_>, _>>()?;
        let ue_qr = stats
            .iter()
            .map(|s| thin_qr(s.ue_steering()))
            .collect::<Result<Vec<_>, _>>()?;
        let bs_refs: Vec<&ComplexMatrix<T>> = stats.iter().map(|s| s.bs_steering()).collect();
        let stacked = ComplexMatrix::hstack(&bs_refs)?;
        Ok(Self {
            config,
            receiver,
            estimators,
            errors,
            ue_qr,
            bs_grams: stats.iter().map(|s| s.bs_gram().clone()).collect(),
            stacked_gram: stacked.gram().hermitian_part(),
            gain_variances: stats.iter().map(|s| s.gain_variance()).collect(),
        })
    }

    pub fn config(&self) -> &DataPhaseConfig<T> {
        &self.config
    }

    /// Rate for one set of estimated path gains `ĝ_k`.
    pub fn rate_from_estimates(&self, estimates: &[Vec<Complex<T>>]) -> Result<T, RateError> {
        if estimates.len() != self.errors.len() {
            return Err(RateError::Dimension(format!(
                "{} estimates for {} UEs",
                estimates.len(),
                self.errors.len()
            )));
        }
        let energy = self.config.symbol_energy();
        let streams = self.config.streams();
        let dim = self.stacked_gram.rows();
        let mut interference = ComplexMatrix::zeros(dim, dim);
        let mut signal = ComplexMatrix::zeros(dim, dim);
        let mut offset = 0;
        for (k, g_hat) in estimates.iter().enumerate() {
            let l = g_hat.len();
            let f = factored_precoder(&self.bs_grams[k], &self.ue_qr[k], g_hat, streams)?;
            let psi = error_interference(&self.errors[k], &f, energy)?;
            let projected = self.errors[k].ue_steering().adjoint_mul(&f)?;
            let d = projected.scale_rows(g_hat)?.scale_real(energy.sqrt());
            interference.set_block(offset, offset, &psi);
            signal.set_block(offset, offset, &d.mul_adjoint(&d)?);
            offset += l;
        }
        if signal.max_abs() == T::zero() {
            return Ok(T::zero());
        }
        let mut with_signal = interference.clone();
        with_signal.axpy(Complex::new(T::one(), T::zero()), &signal)?;
        let inv_noise = T::one() / self.config.sigma_z_sq();
        let shifted = |x: &ComplexMatrix<T>| -> Result<ComplexMatrix<T>, RateError> {
            let mut m = x.matmul(&self.stacked_gram)?.scale_real(inv_noise);
            m.add_diagonal(Complex::new(T::one(), T::zero()));
            Ok(m)
        };
        let gain = log_det(&shifted(&with_signal)?)?.re - log_det(&shifted(&interference)?)?.re;
        Ok(self.config.data_fraction() * gain / T::LN_2())
    }

    /// Draws fading and pilot noise, estimates all channels and returns the resulting rate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T, RateError> {
        let gains: Vec<_> = self
            .gain_variances
            .iter()
            .zip(&self.errors)
            .map(|(&v, e)| sample_gains(rng, e.core().rows(), v))
            .collect();
        let blocks = self.receiver.draw(&gains, self.config.sigma_z_sq(), rng)?;
        let estimates = self
            .estimators
            .iter()
            .zip(&blocks)
            .map(|(est, y)| est.path_gains(y))
            .collect::<Result<Vec<_>, _>>()?;
        self.rate_from_estimates(&estimates)
    }
}

/// Spectral efficiency averaged over `draws` fading and noise realizations with fixed angles.
pub fn sum_rate_mc<T: Real, R: Rng + ?Sized>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
    config: DataPhaseConfig<T>,
    draws: usize,
    rng: &mut R,
) -> Result<RateResult<T>, RateError> {
    if draws == 0 {
        return Err(RateError::InvalidConfig("at least one draw is needed".into()));
    }
    let eval = RateEvaluator::new(scheme, stats, config)?;
    let mut acc = Moments::default();
    for _ in 0..draws {
        acc.push(eval.sample(rng)?.as_f64());
    }
    Ok(RateResult {
        spectral_efficiency: T::lit(acc.mean()),
        trials: draws,
        std_error: T::lit(acc.std_error()),
    })
}

/// `(L T_d / T_c) log₂(1 + (ρ_d / T_d) Σ σ_k² / (L σ_z²))`.
pub fn asymptotic_rate_bound<T: Real>(sigma_sq: &[T], config: &DataPhaseConfig<T>) -> T {
    let total: T = sigma_sq.iter().copied().sum();
    let l = T::lit(config.streams() as f64);
    let snr = config.symbol_energy() * total / (l * config.sigma_z_sq());
    l * config.data_fraction() * (T::one() + snr).log2()
}
