//! Cholesky solves, LU determinants and trace-of-inverse bounds.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::eigen::{condition_from_spectrum, ensure_hermitian, hermitian_evd, RANK_TOL};
use super::{ComplexMatrix, LinalgError};
use crate::Real;

/// Lower-triangular factor of a Hermitian positive definite matrix, `A = L Lᴴ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    lower: ComplexMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factors `a`. A pivot at or below `1e-12 · max_i a_ii` is reported as not positive definite.
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self, LinalgError> {
        ensure_hermitian(a, "cholesky")?;
        if !a.is_finite() {
            return Err(LinalgError::NonFinite { op: "cholesky" });
        }
        let n = a.rows();
        let scale = (0..n).map(|i| a[(i, i)].re.abs()).fold(T::zero(), T::max);
        let tol = T::lit(RANK_TOL) * scale;
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > tol) {
                return Err(LinalgError::NotPositiveDefinite {
                    pivot: d.as_f64(),
                    index: j,
                });
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex::new(djj, T::zero());
            for i in (j + 1)..n {
                // Use the lower triangle of a; the Hermitian check covers the rest.
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn lower(&self) -> &ComplexMatrix<T> {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, LinalgError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinalgError::DimensionMismatch {
                op: "cholesky_solve",
                left: (n, n),
                right: b.shape(),
            });
        }
        let l = &self.lower;
        let mut x = b.clone();
        for c in 0..x.cols() {
            let col = x.col_mut(c);
            // Forward: L y = b.
            for i in 0..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= l[(i, k)] * col[k];
                }
                col[i] = s / l[(i, i)].re;
            }
            // Backward: Lᴴ x = y.
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in (i + 1)..n {
                    s -= l[(k, i)].conj() * col[k];
                }
                col[i] = s / l[(i, i)].re;
            }
        }
        if !x.is_finite() {
            return Err(LinalgError::NonFinite { op: "cholesky_solve" });
        }
        Ok(x)
    }

    /// `ln det A`.
    pub fn log_det(&self) -> T {
        (0..self.dim()).map(|i| self.lower[(i, i)].re.ln()).sum::<T>() * T::lit(2.0)
    }
}

/// Solves `A X = B` for Hermitian positive definite `A`.
pub fn solve_hermitian_pd<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            op: "solve_hermitian_pd",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() != b.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "solve_hermitian_pd",
            left: a.shape(),
            right: b.shape(),
        });
    }
    Cholesky::new(a)?.solve(b)
}

/// Complex `ln det A` of a general square matrix via LU with partial pivoting.
///
/// The imaginary part is the phase of the determinant, reduced to `(-π, π]`.
pub fn log_det<T: Real>(a: &ComplexMatrix<T>) -> Result<Complex<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            op: "log_det",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut acc = Complex::<T>::zero();
    let mut sign = Complex::<T>::one();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| {
                m[(x, k)]
                    .norm()
                    .as_f64()
                    .total_cmp(&m[(y, k)].norm().as_f64())
                    .then(y.cmp(&x))
            })
            .expect("nonempty range");
        let pivot = m[(p, k)];
        if pivot.norm().is_zero() || !pivot.norm().is_finite() {
            return Err(LinalgError::Singular {
                pivot: pivot.norm().as_f64(),
                index: k,
            });
        }
        if p != k {
            for c in 0..n {
                let tmp = m[(k, c)];
                m[(k, c)] = m[(p, c)];
                m[(p, c)] = tmp;
            }
            sign = -sign;
        }
        acc += Complex::new(pivot.norm().ln(), pivot.arg());
        for r in (k + 1)..n {
            let f = m[(r, k)] / pivot;
            if f.is_zero() {
                continue;
            }
            for c in (k + 1)..n {
                let v = m[(k, c)];
                m[(r, c)] -= f * v;
            }
        }
    }
    if sign.re < T::zero() {
        acc.im += T::PI();
    }
    let two_pi = T::lit(2.0) * T::PI();
    let mut im = acc.im % two_pi;
    if im > T::PI() {
        im -= two_pi;
    } else if im <= -T::PI() {
        im += two_pi;
    }
    Ok(Complex::new(acc.re, im))
}

/// Bounds on `tr(A⁻¹)` for Hermitian positive definite `A`.
///
/// `lower = Σ 1/a_ii` and `upper = lower · (1 + κ)² / (4κ)` with `κ` the condition number.
pub fn trace_inverse_bounds<T: Real>(a: &ComplexMatrix<T>) -> Result<(T, T), LinalgError> {
    Cholesky::new(a)?;
    let evd = hermitian_evd(a)?;
    let kappa = condition_from_spectrum(&evd.values)?;
    let lower: T = a.diagonal().iter().map(|d| T::one() / d.re).sum();
    let factor = if kappa.is_infinite() {
        T::infinity()
    } else {
        (T::one() + kappa).powi(2) / (T::lit(4.0) * kappa)
    };
    Ok((lower, lower * factor))
}
