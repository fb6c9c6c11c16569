//! Closed-form error covariances, NMSE and its bounds.

use num_complex::Complex;

use super::{check_noise, interference_covariances, PilotError, PilotScheme, Scenario};
use crate::channel::ChannelStats;
use crate::linalg::{
    condition_number, extreme_eigenvalues, hadamard, hermitian_evd, khatri_rao, shifted_identity, solve_hermitian_pd,
    ComplexMatrix, LowRankPsd, RANK_TOL,
};
use crate::Real;

/// Error covariance `A Φ Aᴴ` with `A = U* ⊙ B` (MN × L) and an L × L core `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCovariance<T> {
    bs_steering: ComplexMatrix<T>,
    ue_steering: ComplexMatrix<T>,
    core: ComplexMatrix<T>,
}

impl<T: Real> ErrorCovariance<T> {
    pub fn new(stats: &ChannelStats<T>, core: ComplexMatrix<T>) -> Result<Self, PilotError> {
        let l = stats.paths();
        if core.shape() != (l, l) {
            return Err(PilotError::Dimension(format!(
                "error core is {:?}, expected {l}x{l}",
                core.shape()
            )));
        }
        Ok(Self {
            bs_steering: stats.bs_steering().clone(),
            ue_steering: stats.ue_steering().clone(),
            core,
        })
    }

    pub(crate) fn from_parts(
        bs_steering: ComplexMatrix<T>,
        ue_steering: ComplexMatrix<T>,
        core: ComplexMatrix<T>,
    ) -> Self {
        Self {
            bs_steering,
            ue_steering,
            core,
        }
    }

    /// Gain-domain error covariance `Φ`.
    pub fn core(&self) -> &ComplexMatrix<T> {
        &self.core
    }

    pub fn bs_steering(&self) -> &ComplexMatrix<T> {
        &self.bs_steering
    }

    pub fn ue_steering(&self) -> &ComplexMatrix<T> {
        &self.ue_steering
    }

    /// `A = U* ⊙ B`.
    pub fn basis(&self) -> ComplexMatrix<T> {
        khatri_rao(&self.ue_steering.conj(), &self.bs_steering).expect("both have L columns")
    }

    /// `tr(Φ AᴴA)` without forming the MN × MN matrix.
    pub fn trace(&self) -> T {
        let gram = hadamard(&self.ue_steering.gram().transpose(), &self.bs_steering.gram()).expect("both L x L");
        let l = self.core.rows();
        let mut acc = T::zero();
        for i in 0..l {
            for j in 0..l {
                acc += (self.core[(i, j)] * gram[(j, i)]).re;
            }
        }
        acc
    }

    pub fn to_dense(&self) -> ComplexMatrix<T> {
        let a = self.basis();
        a.matmul(&self.core)
            .expect("conformable")
            .mul_adjoint(&a)
            .expect("conformable")
            .hermitian_part()
    }

    /// Factored `F Fᴴ` with `F = A V Λ^{1/2}`; negative round-off eigenvalues are dropped.
    pub fn to_low_rank(&self) -> Result<LowRankPsd<T>, PilotError> {
        let evd = hermitian_evd(&self.core)?;
        let floor = T::lit(RANK_TOL) * evd.max().max(T::zero());
        let roots: Vec<Complex<T>> = evd
            .values
            .iter()
            .map(|&v| Complex::new(if v > floor { v.sqrt() } else { T::zero() }, T::zero()))
            .collect();
        let factor = self.basis().matmul(&evd.vectors.scale_cols(&roots)?)?;
        Ok(LowRankPsd::new(factor, T::one())?)
    }
}

/// `ζ = ρ_τ σ² / (L σ_z²)`.
pub fn pilot_snr<T: Real>(rho_tau: T, sigma_sq: T, paths: usize, sigma_z_sq: T) -> T {
    rho_tau * sigma_sq / (T::lit(paths as f64) * sigma_z_sq)
}

/// `(1 + Mζ) / (1 + δMζ)`.
pub fn gain_ratio<T: Real>(bs_antennas: usize, zeta: T, delta: T) -> T {
    let mz = T::lit(bs_antennas as f64) * zeta;
    (T::one() + mz) / (T::one() + delta * mz)
}

/// Asymptotic NMSE ratio of precoded over non-precoded pilots for one UE.
pub fn gain_ratio_puc_over_npuc<T: Real>(stats: &ChannelStats<T>, rho_tau: T, sigma_z_sq: T) -> T {
    let zeta = pilot_snr(rho_tau, stats.sigma_sq(), stats.paths(), sigma_z_sq);
    gain_ratio(stats.bs_antennas(), zeta, stats.delta())
}

/// `(c, X)` such that `Φ = γ (I + c X)⁻¹` for the uncombined scenarios.
fn uncombined_system<T: Real>(
    scenario: Scenario,
    stats: &ChannelStats<T>,
    rho_tau: T,
    sigma_z_sq: T,
) -> Result<(T, ComplexMatrix<T>), PilotError> {
    let zeta = pilot_snr(rho_tau, stats.sigma_sq(), stats.paths(), sigma_z_sq);
    let m_zeta = T::lit(stats.bs_antennas() as f64) * zeta;
    match scenario {
        Scenario::NPuC => Ok((m_zeta, stats.path_gram())),
        Scenario::PuC => {
            let ru = stats.ue_gram();
            let ru_sq = ru.matmul(ru)?;
            Ok((stats.delta() * m_zeta, hadamard(&ru_sq.transpose(), stats.bs_gram())?))
        }
        Scenario::PC => Err(PilotError::UnsupportedScenario {
            op: "uncombined closed form",
            scenario,
        }),
    }
}

/// Closed-form error covariance of UE `k` under orthogonal nPuC or PuC pilots.
pub fn uncombined_error_cov<T: Real>(
    scenario: Scenario,
    stats: &ChannelStats<T>,
    rho_tau: T,
    sigma_z_sq: T,
) -> Result<ErrorCovariance<T>, PilotError> {
    check_noise(sigma_z_sq.as_f64())?;
    if !(rho_tau >= T::zero()) {
        return Err(PilotError::InvalidParameter(format!(
            "pilot energy {rho_tau} is negative"
        )));
    }
    let (c, x) = uncombined_system(scenario, stats, rho_tau, sigma_z_sq)?;
    let system = shifted_identity(&x, c).hermitian_part();
    let l = stats.paths();
    let core = solve_hermitian_pd(&system, &ComplexMatrix::identity(l))?
        .scale_real(stats.gain_variance())
        .hermitian_part();
    ErrorCovariance::new(stats, core)
}

/// Closed-form error covariance of UE `k` for a built scheme.
///
/// For PC the core is `γI − γ² C_kkᴴ (Q_k + Q̄_k)⁻¹ C_kk` with the interference covariances.
pub fn error_cov_closed_form<T: Real>(
    scheme: &PilotScheme<T>,
    stats: &[ChannelStats<T>],
    sigma_z_sq: T,
    k: usize,
) -> Result<ErrorCovariance<T>, PilotError> {
    scheme.check_ue(k)?;
    if stats.len() != scheme.ue_count() {
        return Err(PilotError::Dimension(format!(
            "{} channel statistics for {} UEs",
            stats.len(),
            scheme.ue_count()
        )));
    }
    match scheme.scenario() {
        s @ (Scenario::NPuC | Scenario::PuC) => uncombined_error_cov(s, &stats[k], scheme.rho_tau(), sigma_z_sq),
        Scenario::PC => {
            let (own, others) = interference_covariances(scheme, stats, sigma_z_sq, k)?;
            let st = &stats[k];
            let reduced = st.ue_steering().adjoint_mul(scheme.transmitted(k))?;
            let wb = scheme.combiner(k).apply_adjoint(st.bs_steering())?;
            let obs = khatri_rao(&reduced.transpose(), &wb)?;
            let mut total = own;
            total.axpy(Complex::new(T::one(), T::zero()), &others)?;
            let z = solve_hermitian_pd(&total.hermitian_part(), &obs)?;
            let gamma = st.gain_variance();
            let mut core = obs.adjoint_mul(&z)?.scale_real(-gamma * gamma);
            core.add_diagonal(Complex::new(gamma, T::zero()));
            ErrorCovariance::new(st, core.hermitian_part())
        }
    }
}

/// `tr(R̃) / tr(R)`; zero when the channel covariance is zero.
pub fn nmse<T: Real>(error_cov: &ErrorCovariance<T>, stats: &ChannelStats<T>) -> T {
    let total = stats.trace();
    if total <= T::zero() {
        return T::zero();
    }
    error_cov.trace() / total
}

/// Lower and upper NMSE bounds. `upper` is `+inf` when `R_U` is singular under PuC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmseBounds<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> NmseBounds<T> {
    pub fn contains(&self, value: T, rel_tol: T) -> bool {
        let slack = rel_tol * value.abs();
        value >= self.lower - slack && value <= self.upper + slack
    }
}

/// Bounds from the condition number of `I + cX` and, for PuC, the extreme eigenvalues of `R_U`.
pub fn nmse_bounds<T: Real>(
    scenario: Scenario,
    stats: &ChannelStats<T>,
    rho_tau: T,
    sigma_z_sq: T,
) -> Result<NmseBounds<T>, PilotError> {
    check_noise(sigma_z_sq.as_f64())?;
    let (c, x) = uncombined_system(scenario, stats, rho_tau, sigma_z_sq)?;
    let kappa = condition_number(&shifted_identity(&x, c).hermitian_part())?;
    let spread = if kappa.is_infinite() {
        T::infinity()
    } else {
        let d = T::one() - kappa;
        d * d / (T::lit(4.0) * kappa)
    };
    let relative = if spread.is_zero() { T::zero() } else { spread / c };
    let shortfall = (T::one() - relative).max(T::zero());
    let base = T::one() / (T::one() + c);
    match scenario {
        Scenario::NPuC => Ok(NmseBounds {
            lower: base * shortfall,
            upper: base,
        }),
        _ => {
            let (lmin, lmax) = extreme_eigenvalues(stats.ue_gram())?;
            let upper = if lmin <= T::lit(RANK_TOL) * lmax {
                T::infinity()
            } else {
                base / lmin
            };
            Ok(NmseBounds {
                lower: base * shortfall / lmax,
                upper,
            })
        }
    }
}
