use super::{steering_matrix, ArrayConfig, ChannelError, PathSet};
use crate::linalg::{hadamard, khatri_rao, ComplexMatrix, LowRankPsd};
use crate::Real;

/// Second-order description of one terminal's channel.
///
/// The covariance of `vec(H)` is `γ A Aᴴ` with `A = U* ⊙ B` and `γ = δ M σ²`, `δ = N / L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats<T> {
    bs_steering: ComplexMatrix<T>,
    ue_steering: ComplexMatrix<T>,
    sigma_sq: T,
    delta: T,
    covariance: LowRankPsd<T>,
    ue_gram: ComplexMatrix<T>,
    bs_gram: ComplexMatrix<T>,
}

impl<T: Real> ChannelStats<T> {
    /// Builds the statistics from steering matrices `B` (M × L), `U` (N × L) and the path variance.
    pub fn from_steering(
        bs_steering: ComplexMatrix<T>,
        ue_steering: ComplexMatrix<T>,
        sigma_sq: T,
    ) -> Result<Self, ChannelError> {
        let l = bs_steering.cols();
        if ue_steering.cols() != l {
            return Err(ChannelError::PathCountMismatch {
                aoa: l,
                aod: ue_steering.cols(),
                gains: l,
            });
        }
        if !(sigma_sq >= T::zero()) || !sigma_sq.is_finite() {
            return Err(ChannelError::InvalidVariance(sigma_sq.as_f64()));
        }
        let (m, n) = (bs_steering.rows(), ue_steering.rows());
        let delta = T::lit(n as f64 / l as f64);
        let gamma = delta * T::lit(m as f64) * sigma_sq;
        let factor = khatri_rao(&ue_steering.conj(), &bs_steering)?;
        let covariance = LowRankPsd::new(factor, gamma)?;
        let ue_gram = ue_steering.gram();
        let bs_gram = bs_steering.gram();
        Ok(Self {
            bs_steering,
            ue_steering,
            sigma_sq,
            delta,
            covariance,
            ue_gram,
            bs_gram,
        })
    }

    /// Number of BS antennas `M`.
    pub fn bs_antennas(&self) -> usize {
        self.bs_steering.rows()
    }

    /// Number of UE antennas `N`.
    pub fn ue_antennas(&self) -> usize {
        self.ue_steering.rows()
    }

    /// Number of paths `L`.
    pub fn paths(&self) -> usize {
        self.bs_steering.cols()
    }

    pub fn bs_steering(&self) -> &ComplexMatrix<T> {
        &self.bs_steering
    }

    pub fn ue_steering(&self) -> &ComplexMatrix<T> {
        &self.ue_steering
    }

    /// Path gain variance `σ²` before scaling.
    pub fn sigma_sq(&self) -> T {
        self.sigma_sq
    }

    /// `N / L`.
    pub fn delta(&self) -> T {
        self.delta
    }

    /// Variance of each scaled path gain, `δ M σ² = M N σ² / L`.
    pub fn gain_variance(&self) -> T {
        self.covariance.scale()
    }

    /// Channel covariance in factored form.
    pub fn covariance(&self) -> &LowRankPsd<T> {
        &self.covariance
    }

    /// `Uᴴ U` (L × L).
    pub fn ue_gram(&self) -> &ComplexMatrix<T> {
        &self.ue_gram
    }

    /// `Bᴴ B` (L × L).
    pub fn bs_gram(&self) -> &ComplexMatrix<T> {
        &self.bs_gram
    }

    /// `AᴴA = (UᴴU)ᵀ ∘ BᴴB`, the Gram matrix of the covariance factor.
    pub fn path_gram(&self) -> ComplexMatrix<T> {
        hadamard(&self.ue_gram.transpose(), &self.bs_gram).expect("both L x L")
    }

    /// `tr(R)`; equals `δ M σ² L` for unit-norm steering vectors.
    pub fn trace(&self) -> T {
        self.covariance.trace()
    }

    /// Dense MN × MN covariance. Only for small instances.
    pub fn covariance_dense(&self) -> ComplexMatrix<T> {
        self.covariance.to_dense()
    }
}

/// Statistics of the paths' channel: steering matrices from the angles, covariance factor and
/// Gram matrices.
pub fn stats_from_paths<T: Real>(
    cfg_bs: &ArrayConfig,
    cfg_ue: &ArrayConfig,
    paths: &PathSet<T>,
) -> Result<ChannelStats<T>, ChannelError> {
    paths.validate()?;
    ChannelStats::from_steering(
        steering_matrix(cfg_bs, &paths.aoa),
        steering_matrix(cfg_ue, &paths.aod),
        paths.sigma_sq,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{assemble, sample_paths, AngleRange};
    use crate::linalg::{hermitian_evd, vec};
    use crate::random::derive_stream;

    fn random_paths(seed: u64, l: usize, sigma_sq: f64) -> PathSet<f64> {
        sample_paths(
            &mut derive_stream(seed, 0, 0),
            l,
            AngleRange::default_arrival(),
            AngleRange::default_departure(),
            sigma_sq,
        )
        .unwrap()
    }

    #[test]
    fn trace_and_rank() {
        let (m, n, l) = (6, 4, 3);
        let p = random_paths(1, l, 0.8);
        let st = stats_from_paths(&ArrayConfig::ula(m), &ArrayConfig::ula(n), &p).unwrap();
        let expected = (n as f64 / l as f64) * m as f64 * 0.8 * l as f64;
        assert!((st.trace() - expected).abs() < 1e-10 * expected);
        let dense = st.covariance_dense();
        assert!((dense.trace().re - expected).abs() < 1e-10 * expected);
        assert_eq!(hermitian_evd(&dense).unwrap().rank(), l);
        for i in 0..l {
            assert!((st.ue_gram()[(i, i)].re - 1.0).abs() < 1e-14);
            assert!((st.bs_gram()[(i, i)].re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_variance_zero_covariance() {
        let p = random_paths(2, 2, 0.0);
        let st = stats_from_paths(&ArrayConfig::ula(3), &ArrayConfig::ula(2), &p).unwrap();
        assert_eq!(st.covariance_dense().max_abs(), 0.0);
    }

    #[test]
    fn path_gram_is_factor_gram() {
        let p = random_paths(3, 3, 1.0);
        let st = stats_from_paths(&ArrayConfig::ula(5), &ArrayConfig::ula(4), &p).unwrap();
        let direct = st.covariance().factor().gram();
        assert!(st.path_gram().relative_distance(&direct).unwrap() < 1e-13);
    }

    #[test]
    fn sample_covariance_matches() {
        let (m, n, l) = (3, 2, 2);
        let (cb, cu) = (ArrayConfig::ula(m), ArrayConfig::ula(n));
        let mut p = random_paths(4, l, 1.0);
        let st = stats_from_paths(&cb, &cu, &p).unwrap();
        let mut rng = derive_stream(4, 1, 0);
        let draws = 100_000;
        let mut acc = ComplexMatrix::<f64>::zeros(m * n, m * n);
        for _ in 0..draws {
            p.redraw_gains(&mut rng);
            let h = vec(assemble(&cb, &cu, &p).unwrap().channel());
            acc.axpy(num_complex::Complex::new(1.0, 0.0), &h.mul_adjoint(&h).unwrap())
                .unwrap();
        }
        let sample = acc.scale_real(1.0 / draws as f64);
        assert!(sample.relative_distance(&st.covariance_dense()).unwrap() < 0.05);
    }
}
