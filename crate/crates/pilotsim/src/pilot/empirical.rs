//! Monte Carlo NMSE with fixed angles and fresh fading and noise per draw.

use rand::Rng;

use super::{check_noise, MmseEstimator, PilotError, PilotScheme, Receiver};
use crate::channel::{sample_gains, ChannelStats};
use crate::random::Moments;
use crate::Real;

/// Sample-mean NMSE of one UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalNmse<T> {
    pub mean: T,
    pub std_error: T,
    pub draws: usize,
}

/// Per-UE empirical NMSE `E‖H_k − Ĥ_k‖² / tr(R_k)` over `draws` fading and noise realizations.
///
/// The squared error is evaluated in the gain domain as `eᴴ (AᴴA) e`, which equals the
/// Frobenius norm of `B diag(e) Uᴴ`.
pub fn empirical_nmse<T: Real, R: Rng + ?Sized>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
    sigma_z_sq: T,
    draws: usize,
    rng: &mut R,
) -> Result<Vec<EmpiricalNmse<T>>, PilotError> {
    check_noise(sigma_z_sq.as_f64())?;
    if draws == 0 {
        return Err(PilotError::InvalidParameter(
            "at least one Monte Carlo draw is needed".into(),
        ));
    }
    let receiver = Receiver::new(scheme, stats)?;
    let estimators = (0..scheme.ue_count())
        .map(|k| MmseEstimator::new(scheme, stats, sigma_z_sq, k))
        .collect::<Result<Vec<_>, _>>()?;
    let grams: Vec<_> = stats.iter().map(|s| s.path_gram()).collect();
    let traces: Vec<T> = stats.iter().map(|s| s.trace()).collect();
    let mut moments = vec![Moments::default(); scheme.ue_count()];

    for _ in 0..draws {
        let gains: Vec<_> = stats
            .iter()
            .map(|s| sample_gains(rng, s.paths(), s.gain_variance()))
            .collect();
        let blocks = receiver.draw(&gains, sigma_z_sq, rng)?;
        for (k, est) in estimators.iter().enumerate() {
            let g_hat = est.path_gains(&blocks[k])?;
            let err: Vec<_> = gains[k].iter().zip(&g_hat).map(|(g, h)| g - h).collect();
            let gram = &grams[k];
            let mut sq = T::zero();
            for (i, ei) in err.iter().enumerate() {
                for (j, ej) in err.iter().enumerate() {
                    sq += (ei.conj() * gram[(i, j)] * ej).re;
                }
            }
            let value = if traces[k] > T::zero() {
                sq / traces[k]
            } else {
                T::zero()
            };
            moments[k].push(value.as_f64());
        }
    }
    Ok(moments
        .iter()
        .map(|m| EmpiricalNmse {
            mean: T::lit(m.mean()),
            std_error: T::lit(m.std_error()),
            draws,
        })
        .collect())
}
