use num_complex::Complex;

use super::{PilotError, Scenario};
use crate::channel::ChannelStats;
use crate::linalg::{kronecker, ComplexMatrix};
use crate::Real;

/// Spatial filter: the identity of a given size or an explicit tall matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Filter<T> {
    Identity(usize),
    Matrix(ComplexMatrix<T>),
}

impl<T: Real> Filter<T> {
    /// Number of antennas the filter acts on.
    pub fn input_dim(&self) -> usize {
        match self {
            Filter::Identity(n) => *n,
            Filter::Matrix(m) => m.rows(),
        }
    }

    /// Number of filter outputs.
    pub fn output_dim(&self) -> usize {
        match self {
            Filter::Identity(n) => *n,
            Filter::Matrix(m) => m.cols(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Filter::Identity(_))
    }

    pub fn to_matrix(&self) -> ComplexMatrix<T> {
        match self {
            Filter::Identity(n) => ComplexMatrix::identity(*n),
            Filter::Matrix(m) => m.clone(),
        }
    }

    /// `F x`.
    pub fn apply(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, PilotError> {
        match self {
            Filter::Identity(_) => Ok(x.clone()),
            Filter::Matrix(m) => Ok(m.matmul(x)?),
        }
    }

    /// `Fᴴ x`.
    pub fn apply_adjoint(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, PilotError> {
        match self {
            Filter::Identity(_) => Ok(x.clone()),
            Filter::Matrix(m) => Ok(m.adjoint_mul(x)?),
        }
    }
}

/// Training configuration shared by all UEs of the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotScheme<T> {
    scenario: Scenario,
    t_tau: usize,
    rho_tau: T,
    pilots: Vec<ComplexMatrix<T>>,
    precoders: Vec<Filter<T>>,
    combiners: Vec<Filter<T>>,
    transmitted: Vec<ComplexMatrix<T>>,
}

impl<T: Real> PilotScheme<T> {
    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    /// Pilot length `T_τ`.
    pub fn pilot_length(&self) -> usize {
        self.t_tau
    }

    /// Pilot energy per UE.
    pub fn rho_tau(&self) -> T {
        self.rho_tau
    }

    pub fn ue_count(&self) -> usize {
        self.pilots.len()
    }

    /// Pilot matrix `P_k` (N × T_τ for nPuC, L × T_τ otherwise).
    pub fn pilot(&self, k: usize) -> &ComplexMatrix<T> {
        &self.pilots[k]
    }

    pub fn precoder(&self, k: usize) -> &Filter<T> {
        &self.precoders[k]
    }

    pub fn combiner(&self, k: usize) -> &Filter<T> {
        &self.combiners[k]
    }

    /// Transmitted training block `V_k P_k` (N × T_τ).
    pub fn transmitted(&self, k: usize) -> &ComplexMatrix<T> {
        &self.transmitted[k]
    }

    pub(crate) fn check_ue(&self, k: usize) -> Result<(), PilotError> {
        if k >= self.ue_count() {
            return Err(PilotError::UeIndex {
                index: k,
                count: self.ue_count(),
            });
        }
        Ok(())
    }
}

/// Unitary DFT matrix of size `n`: entry `(r, c)` is `exp(-2πi rc/n) / √n`.
pub fn dft_matrix<T: Real>(n: usize) -> ComplexMatrix<T> {
    let norm = T::one() / T::lit(n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |r, c| {
        // Reduce the exponent mod n first so large sizes keep full phase accuracy.
        let k = (r * c) % n;
        T::cis(-T::lit(2.0) * T::PI() * T::lit(k as f64) / T::lit(n as f64)) * norm
    })
}

/// Builds pilots, precoders and combiners for `ue_count` UEs.
///
/// Orthogonal scenarios take disjoint row blocks of a unitary DFT of size `T_τ`. In PC every UE
/// sends the same `L × T_τ` pilot whose row `ℓ` occupies symbol `ℓ mod T_τ`.
pub fn build_scheme<T: Real>(
    scenario: Scenario,
    ue_count: usize,
    ue_antennas: usize,
    paths: usize,
    t_tau: usize,
    rho_tau: T,
    stats: &[ChannelStats<T>],
) -> Result<PilotScheme<T>, PilotError> {
    if ue_count == 0 || ue_antennas == 0 || paths == 0 {
        return Err(PilotError::InvalidParameter("K, N and L must be positive".into()));
    }
    if !(rho_tau >= T::zero()) || !rho_tau.is_finite() {
        return Err(PilotError::InvalidParameter(format!(
            "pilot energy must be nonnegative, got {rho_tau}"
        )));
    }
    if stats.len() != ue_count {
        return Err(PilotError::Dimension(format!(
            "{} channel statistics for {ue_count} UEs",
            stats.len()
        )));
    }
    let bs_antennas = stats[0].bs_antennas();
    for (k, st) in stats.iter().enumerate() {
        if st.ue_antennas() != ue_antennas || st.paths() != paths || st.bs_antennas() != bs_antennas {
            return Err(PilotError::Dimension(format!(
                "UE {k} statistics are {}x{} with {} paths, expected {bs_antennas}x{ue_antennas} with {paths}",
                st.bs_antennas(),
                st.ue_antennas(),
                st.paths()
            )));
        }
    }
    scenario.check_pilot_length(t_tau, ue_count, ue_antennas, paths)?;

    let pilots: Vec<ComplexMatrix<T>> = match scenario {
        Scenario::NPuC | Scenario::PuC => {
            let rows = if scenario == Scenario::NPuC { ue_antennas } else { paths };
            let dft = dft_matrix::<T>(t_tau);
            let s = (rho_tau / T::lit(rows as f64)).sqrt();
            (0..ue_count)
                .map(|k| dft.row_block(k * rows, rows).scale_real(s))
                .collect()
        }
        Scenario::PC => {
            let s = Complex::new((rho_tau / T::lit(paths as f64)).sqrt(), T::zero());
            let p = ComplexMatrix::from_fn(paths, t_tau, |l, t| {
                if l % t_tau == t {
                    s
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            });
            vec![p; ue_count]
        }
    };
    let precoders: Vec<Filter<T>> = match scenario {
        Scenario::NPuC => vec![Filter::Identity(ue_antennas); ue_count],
        _ => stats.iter().map(|s| Filter::Matrix(s.ue_steering().clone())).collect(),
    };
    let combiners: Vec<Filter<T>> = match scenario {
        Scenario::PC => stats.iter().map(|s| Filter::Matrix(s.bs_steering().clone())).collect(),
        _ => vec![Filter::Identity(bs_antennas); ue_count],
    };
    let transmitted = precoders
        .iter()
        .zip(&pilots)
        .map(|(v, p)| v.apply(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PilotScheme {
        scenario,
        t_tau,
        rho_tau,
        pilots,
        precoders,
        combiners,
        transmitted,
    })
}

/// Dense `P̆_kj` with `P̆_kjᴴ = (V_j P_j)ᵀ ⊗ W_kᴴ`, so that
/// `vec(Y_k) = Σ_j P̆_kjᴴ vec(H_j) + (I ⊗ W_kᴴ) vec(Z)`.
pub fn effective_pilot<T: Real>(scheme: &PilotScheme<T>, k: usize, j: usize) -> Result<ComplexMatrix<T>, PilotError> {
    scheme.check_ue(k)?;
    scheme.check_ue(j)?;
    let vp_t = scheme.transmitted(j).transpose();
    let w_h = scheme.combiner(k).to_matrix().adjoint();
    Ok(kronecker(&vp_t, &w_h).adjoint())
}
