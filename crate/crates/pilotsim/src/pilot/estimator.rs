//! MMSE estimation of the path gains from the filtered training block.
//!
//! With `vec(H_j) = A_j g_j` the observation of UE `k` is `vec(Y_k) = Σ_j C_kj g_j + noise`
//! where `C_kj = X_j ⊙ (W_kᴴ B_j)` and `X_j = (U_jᴴ V_j P_j)ᵀ`. Without combining the noise is
//! white and the estimate is computed in the K·L dimensional gain domain; with combining the
//! system has dimension `T_τ` times the combiner width.

use num_complex::Complex;
use num_traits::Zero;

use super::{check_noise, ErrorCovariance, PilotError, PilotScheme, Scenario};
use crate::channel::ChannelStats;
use crate::linalg::{khatri_rao, kronecker, vec, Cholesky, ComplexMatrix};
use crate::Real;

#[derive(Debug, Clone)]
enum Kind<T> {
    Uncombined {
        bs: Vec<ComplexMatrix<T>>,
        reduced: Vec<ComplexMatrix<T>>,
        gamma_sqrt: Vec<T>,
        system: Cholesky<T>,
    },
    Combined {
        combiner_width: usize,
        /// `γ_k C_kkᴴ Σ_y⁻¹`.
        gain: ComplexMatrix<T>,
    },
}

/// Linear MMSE estimator of one UE's channel with its error covariance core.
#[derive(Debug, Clone)]
pub struct MmseEstimator<T> {
    ue: usize,
    paths: usize,
    pilot_length: usize,
    bs_steering: ComplexMatrix<T>,
    ue_steering: ComplexMatrix<T>,
    error_core: ComplexMatrix<T>,
    kind: Kind<T>,
}

fn check_inputs<T: Real>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
    sigma_z_sq: T,
    k: usize,
) -> Result<(), PilotError> {
    scheme.check_ue(k)?;
    if stats.len() != scheme.ue_count() {
        return Err(PilotError::Dimension(format!(
            "{} channel statistics for {} UEs",
            stats.len(),
            scheme.ue_count()
        )));
    }
    check_noise(sigma_z_sq.as_f64())
}

/// `U_jᴴ V_j P_j` for every UE.
fn reduced_pilots<T: Real>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
) -> Result<Vec<ComplexMatrix<T>>, PilotError> {
    stats
        .iter()
        .enumerate()
        .map(|(j, st)| Ok(st.ue_steering().adjoint_mul(scheme.transmitted(j))?))
        .collect()
}

/// `C_kj` for all `j`, given the combiner of UE `k`.
fn observation_factors<T: Real>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
    k: usize,
) -> Result<Vec<ComplexMatrix<T>>, PilotError> {
    let reduced = reduced_pilots(scheme, stats)?;
    let w = scheme.combiner(k);
    stats
        .iter()
        .zip(&reduced)
        .map(|(st, xt)| {
            let wb = w.apply_adjoint(st.bs_steering())?;
            Ok(khatri_rao(&xt.transpose(), &wb)?)
        })
        .collect()
}

/// `σ_z² (I_T ⊗ W_kᴴ W_k)`.
fn combined_noise<T: Real>(scheme: &PilotScheme<T>, k: usize, sigma_z_sq: T) -> ComplexMatrix<T> {
    let w = scheme.combiner(k).to_matrix();
    kronecker(&ComplexMatrix::identity(scheme.pilot_length()), &w.gram()).scale_real(sigma_z_sq)
}

impl<T: Real> MmseEstimator<T> {
    pub fn new(
        scheme: &PilotScheme<T>,
        stats: &[ChannelStats<T>],
        sigma_z_sq: T,
        k: usize,
    ) -> Result<Self, PilotError> {
        check_inputs(scheme, stats, sigma_z_sq, k)?;
        let paths = stats[k].paths();
        let (error_core, kind) = if scheme.combiner(k).is_identity() {
            Self::build_uncombined(scheme, stats, sigma_z_sq, k)?
        } else {
            Self::build_combined(scheme, stats, sigma_z_sq, k)?
        };
        Ok(Self {
            ue: k,
            paths,
            pilot_length: scheme.pilot_length(),
            bs_steering: stats[k].bs_steering().clone(),
            ue_steering: stats[k].ue_steering().clone(),
            error_core,
            kind,
        })
    }

    fn build_uncombined(
        scheme: &PilotScheme<T>,
        stats: &[ChannelStats<T>],
        sigma_z_sq: T,
        k: usize,
    ) -> Result<(ComplexMatrix<T>, Kind<T>), PilotError> {
        let ues = stats.len();
        let l = stats[k].paths();
        let reduced = reduced_pilots(scheme, stats)?;
        let gamma_sqrt: Vec<T> = stats.iter().map(|s| s.gain_variance().sqrt()).collect();

        // Γ^{1/2} S Γ^{1/2} + σ² I with S_ij = (X_iᴴ X_j) ∘ (B_iᴴ B_j).
        let mut system = ComplexMatrix::zeros(ues * l, ues * l);
        for i in 0..ues {
            for j in 0..ues {
                let xx = reduced[i].conj().matmul(&reduced[j].transpose())?;
                let bb = stats[i].bs_steering().adjoint_mul(stats[j].bs_steering())?;
                let s = gamma_sqrt[i] * gamma_sqrt[j];
                for a in 0..l {
                    for b in 0..l {
                        system[(i * l + a, j * l + b)] = xx[(a, b)] * bb[(a, b)] * s;
                    }
                }
            }
        }
        system = system.hermitian_part();
        system.add_diagonal(Complex::new(sigma_z_sq, T::zero()));
        let chol = Cholesky::new(&system)?;

        let selector = ComplexMatrix::from_fn(ues * l, l, |r, c| {
            if r == k * l + c {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::zero()
            }
        });
        let inv_cols = chol.solve(&selector)?;
        let core = inv_cols
            .row_block(k * l, l)
            .scale_real(sigma_z_sq * stats[k].gain_variance())
            .hermitian_part();
        let bs = stats.iter().map(|s| s.bs_steering().clone()).collect();
        Ok((
            core,
            Kind::Uncombined {
                bs,
                reduced,
                gamma_sqrt,
                system: chol,
            },
        ))
    }

    fn build_combined(
        scheme: &PilotScheme<T>,
        stats: &[ChannelStats<T>],
        sigma_z_sq: T,
        k: usize,
    ) -> Result<(ComplexMatrix<T>, Kind<T>), PilotError> {
        let factors = observation_factors(scheme, stats, k)?;
        let mut cov = combined_noise(scheme, k, sigma_z_sq);
        for (st, c) in stats.iter().zip(&factors) {
            let g = Complex::new(st.gain_variance(), T::zero());
            cov.axpy(g, &c.mul_adjoint(c)?)?;
        }
        let cov = cov.hermitian_part();
        let chol = Cholesky::new(&cov)?;
        let gamma = stats[k].gain_variance();
        let z = chol.solve(&factors[k])?;
        let gain = z.adjoint().scale_real(gamma);
        let mut core = factors[k].adjoint_mul(&z)?.scale_real(-gamma * gamma);
        core.add_diagonal(Complex::new(gamma, T::zero()));
        let core = core.hermitian_part();
        Ok((
            core,
            Kind::Combined {
                combiner_width: scheme.combiner(k).output_dim(),
                gain,
            },
        ))
    }

    pub fn ue(&self) -> usize {
        self.ue
    }

    /// Covariance of the gain error `g_k - ĝ_k` (L × L).
    pub fn error_core(&self) -> &ComplexMatrix<T> {
        &self.error_core
    }

    /// Error covariance of `vec(H_k)` in factored form.
    pub fn error_covariance(&self) -> ErrorCovariance<T> {
        ErrorCovariance::from_parts(
            self.bs_steering.clone(),
            self.ue_steering.clone(),
            self.error_core.clone(),
        )
    }

    /// Estimated scaled path gains `ĝ_k` from this UE's filtered block.
    pub fn path_gains(&self, received: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>, PilotError> {
        match &self.kind {
            Kind::Uncombined {
                bs,
                reduced,
                gamma_sqrt,
                system,
            } => {
                let m = bs[0].rows();
                if received.shape() != (m, self.pilot_length) {
                    return Err(PilotError::Dimension(format!(
                        "received block is {:?}, expected {:?}",
                        received.shape(),
                        (m, self.pilot_length)
                    )));
                }
                let l = self.paths;
                let mut rhs = ComplexMatrix::zeros(bs.len() * l, 1);
                for (j, (b, xt)) in bs.iter().zip(reduced).enumerate() {
                    let by = b.adjoint_mul(received)?;
                    for a in 0..l {
                        let mut acc = Complex::zero();
                        for t in 0..self.pilot_length {
                            acc += by[(a, t)] * xt[(a, t)].conj();
                        }
                        rhs[(j * l + a, 0)] = acc * gamma_sqrt[j];
                    }
                }
                let u = system.solve(&rhs)?;
                let s = gamma_sqrt[self.ue];
                Ok((0..l).map(|a| u[(self.ue * l + a, 0)] * s).collect())
            }
            Kind::Combined { combiner_width, gain } => {
                if received.shape() != (*combiner_width, self.pilot_length) {
                    return Err(PilotError::Dimension(format!(
                        "received block is {:?}, expected {:?}",
                        received.shape(),
                        (*combiner_width, self.pilot_length)
                    )));
                }
                Ok(gain.matmul(&vec(received))?.into_vec())
            }
        }
    }

    /// Channel estimate `B_k diag(ĝ_k) U_kᴴ` (M × N).
    pub fn estimate(&self, received: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, PilotError> {
        let g = self.path_gains(received)?;
        Ok(self.bs_steering.scale_cols(&g)?.mul_adjoint(&self.ue_steering)?)
    }
}

/// MMSE channel estimate of UE `k` (M × N) from its filtered training block.
pub fn mmse_estimate<T: Real>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
    received: &ComplexMatrix<T>,
    sigma_z_sq: T,
    k: usize,
) -> Result<ComplexMatrix<T>, PilotError> {
    MmseEstimator::new(scheme, stats, sigma_z_sq, k)?.estimate(received)
}

/// Signal-plus-noise and inter-UE covariances `(Q_k, Q̄_k)` of the combined observation.
pub fn interference_covariances<T: Real>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
    sigma_z_sq: T,
    k: usize,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>), PilotError> {
    if scheme.scenario() != Scenario::PC {
        return Err(PilotError::UnsupportedScenario {
            op: "interference_covariances",
            scenario: scheme.scenario(),
        });
    }
    check_inputs(scheme, stats, sigma_z_sq, k)?;
    let factors = observation_factors(scheme, stats, k)?;
    let dim = factors[k].rows();
    let mut own = combined_noise(scheme, k, sigma_z_sq);
    let mut others = ComplexMatrix::zeros(dim, dim);
    for (j, (st, c)) in stats.iter().zip(&factors).enumerate() {
        let term = c.mul_adjoint(c)?;
        let g = Complex::new(st.gain_variance(), T::zero());
        if j == k {
            own.axpy(g, &term)?;
        } else {
            others.axpy(g, &term)?;
        }
    }
    Ok((own.hermitian_part(), others.hermitian_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{assemble, sample_paths, stats_from_paths, AngleRange, ArrayConfig, PathSet};
    use crate::pilot::{build_scheme, receive};
    use crate::random::derive_stream;

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
    fn huge_noise_shrinks_to_zero() {
        for (scenario, t) in [(Scenario::NPuC, 2), (Scenario::PuC, 2), (Scenario::PC, 1)] {
            let (s, stats, paths) = setup(scenario, 1, 4, 2, 2, t, 1);
            let ch = assemble(&ArrayConfig::ula(4), &ArrayConfig::ula(2), &paths[0]).unwrap();
            let y = receive(&s, std::slice::from_ref(&ch), 1e12, &mut derive_stream(1, 1, 0)).unwrap();
            let est = mmse_estimate(&s, &stats, &y[0], 1e12, 0).unwrap();
            assert!(
                est.frobenius_norm() <= 1e-4 * ch.channel().frobenius_norm(),
                "{scenario}"
            );
        }
    }

    #[test]
    fn single_ue_pc_full_length_matches_puc_core() {
        let (pc, stats, _) = setup(Scenario::PC, 1, 16, 4, 2, 2, 2);
        let puc = build_scheme(Scenario::PuC, 1, 4, 2, 2, 1.0, &stats).unwrap();
        let a = MmseEstimator::new(&pc, &stats, 1.0, 0).unwrap();
        let b = MmseEstimator::new(&puc, &stats, 1.0, 0).unwrap();
        assert!(a.error_core().relative_distance(b.error_core()).unwrap() < 1e-10);
    }

    #[test]
    fn interference_needs_pc_and_vanishes_for_one_ue() {
        let (s, stats, _) = setup(Scenario::PuC, 1, 4, 2, 2, 2, 3);
        assert!(interference_covariances(&s, &stats, 1.0, 0).is_err());
        let (s, stats, _) = setup(Scenario::PC, 1, 4, 2, 2, 1, 3);
        let (q, qbar) = interference_covariances(&s, &stats, 1.0, 0).unwrap();
        assert_eq!(qbar.max_abs(), 0.0);
        assert!(q.is_hermitian(1e-14));
    }

    #[test]
    fn wrong_shapes_rejected() {
        let (s, stats, _) = setup(Scenario::PuC, 1, 4, 2, 2, 2, 4);
        let est = MmseEstimator::new(&s, &stats, 1.0, 0).unwrap();
        assert!(est.path_gains(&ComplexMatrix::zeros(3, 2)).is_err());
        assert!(MmseEstimator::new(&s, &stats, 0.0, 0).is_err());
        assert!(MmseEstimator::new(&s, &stats, 1.0, 1).is_err());
    }
}
