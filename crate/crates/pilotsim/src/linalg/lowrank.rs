use num_complex::Complex;

use super::{ComplexMatrix, LinalgError};
use crate::Real;

/// Hermitian PSD matrix stored as `scale · F Fᴴ` with a tall factor `F` (d × r).
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankPsd<T> {
    factor: ComplexMatrix<T>,
    scale: T,
}

impl<T: Real> LowRankPsd<T> {
    pub fn new(factor: ComplexMatrix<T>, scale: T) -> Result<Self, LinalgError> {
        if !(scale >= T::zero()) || !scale.is_finite() || !factor.is_finite() {
            return Err(LinalgError::NonFinite { op: "low_rank_psd" });
        }
        Ok(Self { factor, scale })
    }

    pub fn factor(&self) -> &ComplexMatrix<T> {
        &self.factor
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Side length of the represented square matrix.
    pub fn dim(&self) -> usize {
        self.factor.rows()
    }

    /// Upper bound on the rank.
    pub fn max_rank(&self) -> usize {
        self.factor.cols()
    }

    pub fn trace(&self) -> T {
        self.scale * self.factor.frobenius_norm_sq()
    }

    /// Materializes the d × d matrix.
    pub fn to_dense(&self) -> ComplexMatrix<T> {
        self.factor
            .mul_adjoint(&self.factor)
            .expect("conformable")
            .scale_real(self.scale)
    }

    /// `scale · F (Fᴴ x)`.
    pub fn apply(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, LinalgError> {
        let inner = self.factor.adjoint_mul(x)?;
        Ok(self.factor.matmul(&inner)?.scale(Complex::new(self.scale, T::zero())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_evd;

    #[test]
    fn reconstruction_is_psd_with_bounded_rank() {
        let f = ComplexMatrix::<f64>::from_fn(5, 2, |i, j| Complex::new(i as f64 - j as f64, 0.3 * j as f64));
        let r = LowRankPsd::new(f, 1.5).unwrap();
        let dense = r.to_dense();
        let evd = hermitian_evd(&dense).unwrap();
        assert!(evd.values.iter().all(|&v| v >= -1e-12 * evd.max()));
        assert!(evd.rank() <= 2);
        assert!((dense.trace().re - r.trace()).abs() < 1e-12 * r.trace());
        let x = ComplexMatrix::from_fn(5, 1, |i, _| Complex::new(1.0, i as f64));
        assert!(
            r.apply(&x)
                .unwrap()
                .relative_distance(&dense.matmul(&x).unwrap())
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn negative_scale_rejected() {
        assert!(LowRankPsd::new(ComplexMatrix::<f64>::identity(2), -1.0).is_err());
    }
}
