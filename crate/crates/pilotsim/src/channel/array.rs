use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ChannelError;
use crate::linalg::ComplexMatrix;
use crate::Real;

/// Element layout of an antenna array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// Elements on a line at multiples of the element spacing.
    UniformLinear,
    /// Elements on a line at arbitrary positions, in wavelengths.
    RandomPositions { positions: Vec<f64> },
}

/// Antenna array description.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    element_count: usize,
    geometry: Geometry,
    spacing: f64,
}

impl ArrayConfig {
    pub fn new(element_count: usize, geometry: Geometry, spacing: f64) -> Result<Self, ChannelError> {
        if element_count == 0 {
            return Err(ChannelError::InvalidArray("element count must be at least 1".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(ChannelError::InvalidArray(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if let Geometry::RandomPositions { positions } = &geometry {
            if positions.len() != element_count || positions.iter().any(|p| !p.is_finite()) {
                return Err(ChannelError::InvalidArray(format!(
                    "expected {element_count} finite positions, got {}",
                    positions.len()
                )));
            }
        }
        Ok(Self {
            element_count,
            geometry,
            spacing,
        })
    }

    /// Half-wavelength uniform linear array.
    pub fn ula(element_count: usize) -> Self {
        Self::new(element_count, Geometry::UniformLinear, 0.5).expect("positive element count")
    }

    /// Linear array whose elements sit at sorted uniform positions over the aperture of a
    /// uniform array with the same count and spacing.
    pub fn random_positions<R: Rng + ?Sized>(
        element_count: usize,
        spacing: f64,
        rng: &mut R,
    ) -> Result<Self, ChannelError> {
        let aperture = spacing * element_count.saturating_sub(1) as f64;
        let mut positions: Vec<f64> = (0..element_count)
            .map(|_| {
                if aperture > 0.0 {
                    rng.random_range(0.0..aperture)
                } else {
                    0.0
                }
            })
            .collect();
        positions.sort_by(f64::total_cmp);
        Self::new(element_count, Geometry::RandomPositions { positions }, spacing)
    }

    pub fn element_count(&self) -> usize {
        self.element_count
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    fn position(&self, m: usize) -> f64 {
        match &self.geometry {
            Geometry::UniformLinear => self.spacing * m as f64,
            Geometry::RandomPositions { positions } => positions[m],
        }
    }
}

/// Unit-norm array response for one angle (element_count × 1).
pub fn steering_vector<T: Real>(cfg: &ArrayConfig, angle: T) -> ComplexMatrix<T> {
    let n = cfg.element_count();
    let norm = T::one() / T::lit(n as f64).sqrt();
    let s = angle.sin();
    let two_pi = T::lit(2.0) * T::PI();
    ComplexMatrix::from_fn(n, 1, |m, _| T::cis(two_pi * T::lit(cfg.position(m)) * s) * norm)
}

/// Steering vectors for several angles, one per column.
pub fn steering_matrix<T: Real>(cfg: &ArrayConfig, angles: &[T]) -> ComplexMatrix<T> {
    let n = cfg.element_count();
    let norm = T::one() / T::lit(n as f64).sqrt();
    let two_pi = T::lit(2.0) * T::PI();
    ComplexMatrix::from_fn(n, angles.len(), |m, l| {
        T::cis(two_pi * T::lit(cfg.position(m)) * angles[l].sin()) * norm
    })
}
