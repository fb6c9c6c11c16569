use num_complex::Complex;
use rand::Rng;

use super::{PilotError, PilotScheme};
use crate::channel::{ChannelRealization, ChannelStats};
use crate::linalg::ComplexMatrix;
use crate::random::complex_gaussian;
use crate::Real;

/// `rows × cols` block of i.i.d. CN(0, variance) entries, drawn in column-major order.
pub(crate) fn noise_block<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: T,
) -> ComplexMatrix<T> {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng, variance)).collect();
    ComplexMatrix::from_col_major(rows, cols, data).expect("positive dimensions")
}

fn filter_outputs<T: Real>(
    scheme: &PilotScheme<T>,
    total: &ComplexMatrix<T>,
) -> Result<Vec<ComplexMatrix<T>>, PilotError> {
    let mut out: Vec<ComplexMatrix<T>> = Vec::with_capacity(scheme.ue_count());
    for k in 0..scheme.ue_count() {
        let w = scheme.combiner(k);
        // Identity combiners share the same block; reuse the first copy.
        if w.is_identity() {
            if let Some(prev) = (0..k).find(|&i| scheme.combiner(i).is_identity()) {
                let copy = out[prev].clone();
                out.push(copy);
                continue;
            }
        }
        out.push(w.apply_adjoint(total)?);
    }
    Ok(out)
}

/// Filtered training blocks `Y_k = W_kᴴ (Σ_j H_j V_j P_j + Z)` for every UE `k`.
///
/// Noise is skipped entirely (no draws consumed) when `sigma_z_sq` is zero.
pub fn receive<T: Real, R: Rng + ?Sized>(
    scheme: &PilotScheme<T>,
    channels: &[ChannelRealization<T>],
    sigma_z_sq: T,
    rng: &mut R,
) -> Result<Vec<ComplexMatrix<T>>, PilotError> {
    if channels.len() != scheme.ue_count() {
        return Err(PilotError::Dimension(format!(
            "{} channels for {} UEs",
            channels.len(),
            scheme.ue_count()
        )));
    }
    let m = channels[0].bs_steering().rows();
    let t = scheme.pilot_length();
    let mut total = ComplexMatrix::zeros(m, t);
    for (j, ch) in channels.iter().enumerate() {
        let reduced = ch.ue_steering().adjoint_mul(scheme.transmitted(j))?;
        let weighted = reduced.scale_rows(ch.scaled_gains())?;
        total.axpy(Complex::new(T::one(), T::zero()), &ch.bs_steering().matmul(&weighted)?)?;
    }
    if sigma_z_sq > T::zero() {
        total.axpy(Complex::new(T::one(), T::zero()), &noise_block(rng, m, t, sigma_z_sq))?;
    }
    filter_outputs(scheme, &total)
}

/// Precomputed training-phase geometry for repeated draws with fixed angles.
#[derive(Debug, Clone)]
pub struct Receiver<T> {
    scheme: PilotScheme<T>,
    bs_steering: Vec<ComplexMatrix<T>>,
    /// `U_jᴴ V_j P_j` (L × T_τ) per UE.
    reduced_pilots: Vec<ComplexMatrix<T>>,
    gain_scale: T,
}

impl<T: Real> Receiver<T> {
    pub fn new(scheme: &PilotScheme<T>, stats: &[ChannelStats<T>]) -> Result<Self, PilotError> {
        if stats.len() != scheme.ue_count() {
            return Err(PilotError::Dimension(format!(
                "{} channel statistics for {} UEs",
                stats.len(),
                scheme.ue_count()
            )));
        }
        let reduced_pilots = stats
            .iter()
            .enumerate()
            .map(|(j, st)| st.ue_steering().adjoint_mul(scheme.transmitted(j)))
            .collect::<Result<Vec<_>, _>>()?;
        let st = &stats[0];
        Ok(Self {
            scheme: scheme.clone(),
            bs_steering: stats.iter().map(|s| s.bs_steering().clone()).collect(),
            reduced_pilots,
            gain_scale: crate::channel::gain_scale(st.bs_antennas(), st.ue_antennas(), st.paths()),
        })
    }

    pub fn scheme(&self) -> &PilotScheme<T> {
        &self.scheme
    }

    /// `U_jᴴ V_j P_j` for UE `j`.
    pub fn reduced_pilot(&self, j: usize) -> &ComplexMatrix<T> {
        &self.reduced_pilots[j]
    }

    /// Factor `√(MN/L)` between unit path gains and the entries of `G`.
    pub fn gain_scale(&self) -> T {
        self.gain_scale
    }

    /// Noiseless superposition `Σ_j B_j diag(g_j) U_jᴴ V_j P_j` for scaled gains `g_j`.
    pub fn superimpose(&self, scaled_gains: &[Vec<Complex<T>>]) -> Result<ComplexMatrix<T>, PilotError> {
        if scaled_gains.len() != self.bs_steering.len() {
            return Err(PilotError::Dimension(format!(
                "{} gain vectors for {} UEs",
                scaled_gains.len(),
                self.bs_steering.len()
            )));
        }
        let m = self.bs_steering[0].rows();
        let mut total = ComplexMatrix::zeros(m, self.scheme.pilot_length());
        for (j, g) in scaled_gains.iter().enumerate() {
            let weighted = self.reduced_pilots[j].scale_rows(g)?;
            total.axpy(
                Complex::new(T::one(), T::zero()),
                &self.bs_steering[j].matmul(&weighted)?,
            )?;
        }
        Ok(total)
    }

    /// Per-UE filtered blocks for the given scaled gains plus fresh noise.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        scaled_gains: &[Vec<Complex<T>>],
        sigma_z_sq: T,
        rng: &mut R,
    ) -> Result<Vec<ComplexMatrix<T>>, PilotError> {
        let mut total = self.superimpose(scaled_gains)?;
        if sigma_z_sq > T::zero() {
            let (m, t) = total.shape();
            total.axpy(Complex::new(T::one(), T::zero()), &noise_block(rng, m, t, sigma_z_sq))?;
        }
        filter_outputs(&self.scheme, &total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{assemble, sample_paths, stats_from_paths, AngleRange, ArrayConfig, PathSet};
    use crate::pilot::{build_scheme, Scenario};
    use crate::random::derive_stream;

    type M = ComplexMatrix<f64>;

    fn setup(
        scenario: Scenario,
        k: usize,
        m: usize,
        n: usize,
        l: usize,
        t: usize,
        seed: u64,
    ) -> (PilotScheme<f64>, Vec<ChannelStats<f64>>, Vec<PathSet<f64>>) {
        let mut rng = derive_stream(seed, 0, 0);
        let (cb, cu) = (ArrayConfig::ula(m), ArrayConfig::ula(n));
        let paths: Vec<PathSet<f64>> = (0..k)
            .map(|_| {
                sample_paths(
                    &mut rng,
                    l,
                    AngleRange::default_arrival(),
                    AngleRange::default_departure(),
                    1.0,
                )
                .unwrap()
            })
            .collect();
        let stats: Vec<_> = paths.iter().map(|p| stats_from_paths(&cb, &cu, p).unwrap()).collect();
        let scheme = build_scheme(scenario, k, n, l, t, 1.0, &stats).unwrap();
        (scheme, stats, paths)
    }

    #[test]
    fn noiseless_single_ue_is_hp() {
        let (s, _, paths) = setup(Scenario::NPuC, 1, 4, 3, 2, 3, 1);
        let ch = assemble(&ArrayConfig::ula(4), &ArrayConfig::ula(3), &paths[0]).unwrap();
        let y = receive(&s, std::slice::from_ref(&ch), 0.0, &mut derive_stream(0, 0, 0)).unwrap();
        let hp = ch.channel().matmul(s.pilot(0)).unwrap();
        assert!(y[0].relative_distance(&hp).unwrap() < 1e-13);
    }

    #[test]
    fn receive_is_linear_in_channel() {
        let (s, _, paths) = setup(Scenario::PC, 2, 4, 3, 2, 2, 2);
        let chans: Vec<_> = paths
            .iter()
            .map(|p| assemble(&ArrayConfig::ula(4), &ArrayConfig::ula(3), p).unwrap())
            .collect();
        let doubled: Vec<_> = chans.iter().map(|c| c.scaled(2.0)).collect();
        let y1 = receive(&s, &chans, 0.0, &mut derive_stream(0, 0, 0)).unwrap();
        let y2 = receive(&s, &doubled, 0.0, &mut derive_stream(0, 0, 0)).unwrap();
        for k in 0..2 {
            assert!(y2[k].relative_distance(&y1[k].scale_real(2.0)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn pure_noise_covariance() {
        let (s, stats, paths) = setup(Scenario::PC, 1, 4, 3, 2, 1, 3);
        let zero: Vec<_> = paths
            .iter()
            .map(|p| {
                let ch = assemble(&ArrayConfig::ula(4), &ArrayConfig::ula(3), p).unwrap();
                ch.scaled(0.0)
            })
            .collect();
        let mut rng = derive_stream(3, 1, 0);
        let draws = 10_000;
        let mut acc = M::zeros(2, 2);
        for _ in 0..draws {
            let y = receive(&s, &zero, 1.0, &mut rng).unwrap();
            acc.axpy(Complex::new(1.0, 0.0), &y[0].mul_adjoint(&y[0]).unwrap())
                .unwrap();
        }
        let sample = acc.scale_real(1.0 / draws as f64);
        assert!(sample.relative_distance(stats[0].bs_gram()).unwrap() < 0.05);
    }

    #[test]
    fn receiver_matches_receive() {
        let (s, stats, paths) = setup(Scenario::PuC, 2, 5, 4, 2, 4, 4);
        let chans: Vec<_> = paths
            .iter()
            .map(|p| assemble(&ArrayConfig::ula(5), &ArrayConfig::ula(4), p).unwrap())
            .collect();
        let rx = Receiver::new(&s, &stats).unwrap();
        let gains: Vec<Vec<_>> = chans.iter().map(|c| c.scaled_gains().to_vec()).collect();
        let a = receive(&s, &chans, 0.7, &mut derive_stream(1, 2, 3)).unwrap();
        let b = rx.draw(&gains, 0.7, &mut derive_stream(1, 2, 3)).unwrap();
        for k in 0..2 {
            assert!(a[k].relative_distance(&b[k]).unwrap() < 1e-13);
        }
    }
}
