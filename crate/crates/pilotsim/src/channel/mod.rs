//! Cluster channel model: steering vectors, path sampling, channel assembly and covariance.

mod array;
mod stats;

pub use array::{steering_matrix, steering_vector, ArrayConfig, Geometry};
pub use stats::{stats_from_paths, ChannelStats};

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};
use crate::random::complex_gaussian;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid array: {0}")]
    InvalidArray(String),
    #[error("invalid angle range [{low}, {high}]")]
    InvalidRange { low: f64, high: f64 },
    #[error("path count must be at least 1")]
    NoPaths,
    #[error("path fields disagree on the number of paths: aoa {aoa}, aod {aod}, gains {gains}")]
    PathCountMismatch { aoa: usize, aod: usize, gains: usize },
    #[error("path variance must be finite and nonnegative, got {0}")]
    InvalidVariance(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Closed interval of angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct AngleRange {
    low: f64,
    high: f64,
}

impl AngleRange {
    pub fn new(low: f64, high: f64) -> Result<Self, ChannelError> {
        if !(low.is_finite() && high.is_finite() && low <= high) {
            return Err(ChannelError::InvalidRange { low, high });
        }
        Ok(Self { low, high })
    }

    /// Default arrival range at the base station, `[-π/3, π/3]`.
    pub fn default_arrival() -> Self {
        let w = std::f64::consts::FRAC_PI_3;
        Self { low: -w, high: w }
    }

    /// Default departure range at the terminal, `[-π/6, π/6]`.
    pub fn default_departure() -> Self {
        let w = std::f64::consts::FRAC_PI_6;
        Self { low: -w, high: w }
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.low && x <= self.high
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.low == self.high {
            self.low
        } else {
            rng.random_range(self.low..self.high)
        }
    }
}

impl TryFrom<[f64; 2]> for AngleRange {
    type Error = ChannelError;

    fn try_from(v: [f64; 2]) -> Result<Self, ChannelError> {
        Self::new(v[0], v[1])
    }
}

impl From<AngleRange> for [f64; 2] {
    fn from(r: AngleRange) -> Self {
        [r.low, r.high]
    }
}

/// Angles, unscaled path gains and gain variance of the `L` paths of one terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet<T> {
    pub aoa: Vec<T>,
    pub aod: Vec<T>,
    pub gains: Vec<Complex<T>>,
    pub sigma_sq: T,
}

impl<T: Real> PathSet<T> {
    pub fn new(aoa: Vec<T>, aod: Vec<T>, gains: Vec<Complex<T>>, sigma_sq: T) -> Result<Self, ChannelError> {
        let p = Self {
            aoa,
            aod,
            gains,
            sigma_sq,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let (a, d, g) = (self.aoa.len(), self.aod.len(), self.gains.len());
        if a == 0 {
            return Err(ChannelError::NoPaths);
        }
        if a != d || a != g {
            return Err(ChannelError::PathCountMismatch {
                aoa: a,
                aod: d,
                gains: g,
            });
        }
        if !(self.sigma_sq >= T::zero()) || !self.sigma_sq.is_finite() {
            return Err(ChannelError::InvalidVariance(self.sigma_sq.as_f64()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.aoa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aoa.is_empty()
    }

    /// Fresh gains for the same angles.
    pub fn redraw_gains<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.gains = sample_gains(rng, self.len(), self.sigma_sq);
    }

    /// Copy with zero-mean Gaussian jitter of standard deviation `std_dev` on every angle.
    ///
    /// Extension hook for mismatched second-order statistics; not used by the default runners.
    pub fn jittered<R: Rng + ?Sized>(&self, std_dev: T, rng: &mut R) -> Self {
        let mut jitter = |x: &T| {
            let n: f64 = rng.sample(rand_distr::StandardNormal);
            *x + std_dev * T::lit(n)
        };
        let aoa = self.aoa.iter().map(&mut jitter).collect();
        let aod = self.aod.iter().map(&mut jitter).collect();
        Self {
            aoa,
            aod,
            gains: self.gains.clone(),
            sigma_sq: self.sigma_sq,
        }
    }
}

/// `count` i.i.d. CN(0, sigma_sq) gains.
pub fn sample_gains<T: Real, R: Rng + ?Sized>(rng: &mut R, count: usize, sigma_sq: T) -> Vec<Complex<T>> {
    (0..count).map(|_| complex_gaussian(rng, sigma_sq)).collect()
}

/// Draws `L` (arrival, departure) angle pairs, redrawing any pair that repeats an earlier one.
pub fn sample_angles<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    paths: usize,
    aoa_range: AngleRange,
    aod_range: AngleRange,
) -> (Vec<T>, Vec<T>) {
    let mut aoa: Vec<T> = Vec::with_capacity(paths);
    let mut aod: Vec<T> = Vec::with_capacity(paths);
    let mut redraws = 0usize;
    while aoa.len() < paths {
        let a = T::lit(aoa_range.sample(rng));
        let d = T::lit(aod_range.sample(rng));
        let repeated = aoa.iter().zip(&aod).any(|(&x, &y)| x == a && y == d);
        // Degenerate ranges make every pair equal; accept rather than loop forever.
        if repeated && redraws < 64 {
            redraws += 1;
            log::warn!("resampling a repeated path angle pair");
            continue;
        }
        aoa.push(a);
        aod.push(d);
    }
    (aoa, aod)
}

/// Samples angles uniformly from the ranges and gains from CN(0, sigma_sq).
pub fn sample_paths<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    paths: usize,
    aoa_range: AngleRange,
    aod_range: AngleRange,
    sigma_sq: T,
) -> Result<PathSet<T>, ChannelError> {
    if paths == 0 {
        return Err(ChannelError::NoPaths);
    }
    let (aoa, aod) = sample_angles(rng, paths, aoa_range, aod_range);
    let gains = sample_gains(rng, paths, sigma_sq);
    PathSet::new(aoa, aod, gains, sigma_sq)
}

/// One fading block for one terminal: `H = B G Uᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    bs_steering: ComplexMatrix<T>,
    ue_steering: ComplexMatrix<T>,
    scaled_gains: Vec<Complex<T>>,
    channel: ComplexMatrix<T>,
}

impl<T: Real> ChannelRealization<T> {
    /// Builds the realization from steering matrices and the already scaled diagonal of `G`.
    pub fn from_parts(
        bs_steering: ComplexMatrix<T>,
        ue_steering: ComplexMatrix<T>,
        scaled_gains: Vec<Complex<T>>,
    ) -> Result<Self, ChannelError> {
        let l = scaled_gains.len();
        if bs_steering.cols() != l || ue_steering.cols() != l {
            return Err(ChannelError::PathCountMismatch {
                aoa: bs_steering.cols(),
                aod: ue_steering.cols(),
                gains: l,
            });
        }
        let channel = bs_steering.scale_cols(&scaled_gains)?.mul_adjoint(&ue_steering)?;
        Ok(Self {
            bs_steering,
            ue_steering,
            scaled_gains,
            channel,
        })
    }

    /// BS steering matrix `B` (M × L).
    pub fn bs_steering(&self) -> &ComplexMatrix<T> {
        &self.bs_steering
    }

    /// UE steering matrix `U` (N × L).
    pub fn ue_steering(&self) -> &ComplexMatrix<T> {
        &self.ue_steering
    }

    /// Diagonal of `G`, including the `√(MN/L)` factor.
    pub fn scaled_gains(&self) -> &[Complex<T>] {
        &self.scaled_gains
    }

    pub fn gain_matrix(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_diagonal(&self.scaled_gains)
    }

    /// Channel matrix `H` (M × N).
    pub fn channel(&self) -> &ComplexMatrix<T> {
        &self.channel
    }

    /// Same paths with every gain multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let gains = self.scaled_gains.iter().map(|&g| g * factor).collect();
        Self::from_parts(self.bs_steering.clone(), self.ue_steering.clone(), gains).expect("shapes unchanged")
    }
}

/// `√(MN/L)`: maps unit-variance path gains onto the entries of `G`.
pub fn gain_scale<T: Real>(bs_antennas: usize, ue_antennas: usize, paths: usize) -> T {
    T::lit((bs_antennas * ue_antennas) as f64 / paths as f64).sqrt()
}

/// Assembles `H = B G Uᴴ` for the given arrays and paths.
pub fn assemble<T: Real>(
    cfg_bs: &ArrayConfig,
    cfg_ue: &ArrayConfig,
    paths: &PathSet<T>,
) -> Result<ChannelRealization<T>, ChannelError> {
    paths.validate()?;
    let b = steering_matrix(cfg_bs, &paths.aoa);
    let u = steering_matrix(cfg_ue, &paths.aod);
    let s = gain_scale::<T>(cfg_bs.element_count(), cfg_ue.element_count(), paths.len());
    let g = paths.gains.iter().map(|&x| x * s).collect();
    ChannelRealization::from_parts(b, u, g)
}
