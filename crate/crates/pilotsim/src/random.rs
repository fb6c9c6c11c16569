//! Seeded random streams and Gaussian helpers.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::Real;

/// Random stream handed to every sampling routine.
pub type Stream = ChaCha8Rng;

/// Reproducible stream for `(master_seed, trial_index, realization_index)`.
///
/// The ChaCha key is built from the seed and trial index and the realization index selects the
/// stream word, so distinct triples never share output and the mapping is platform independent.
pub fn derive_stream(master_seed: u64, trial_index: u64, realization_index: u64) -> Stream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial_index.to_le_bytes());
    key[16..24].copy_from_slice(b"pilotsim");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(realization_index);
    rng
}

/// One draw from CN(0, variance): real and imaginary parts each N(0, variance/2).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, variance: T) -> Complex<T> {
    let s = (variance.as_f64() * 0.5).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// Running sums for a sample mean and its standard error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    /// Pools another sample into this one.
    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}
