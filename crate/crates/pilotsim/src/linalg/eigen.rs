//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{ComplexMatrix, LinalgError};
use crate::Real;

/// Relative tolerance for the Hermitian check on inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-12;
/// Relative gap under which two eigenvalues are treated as tied when ordering.
const TIE_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianEvd<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEvd<T> {
    pub fn max(&self) -> T {
        self.values[0]
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }

    /// Number of eigenvalues above the rank tolerance.
    pub fn rank(&self) -> usize {
        let tol = T::lit(RANK_TOL) * self.max().abs();
        self.values.iter().filter(|&&v| v > tol).count()
    }

    /// Rebuilds `E diag(values) Eᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d: Vec<Complex<T>> = self.values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let scaled = self.vectors.scale_cols(&d).expect("conformable");
        scaled.mul_adjoint(&self.vectors).expect("conformable")
    }
}

fn check_hermitian<T: Real>(a: &ComplexMatrix<T>, op: &'static str) -> Result<(), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            op,
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let deviation = a.hermitian_deviation();
    if deviation > T::lit(HERMITIAN_TOL) || deviation.is_nan() {
        return Err(LinalgError::NotHermitian {
            deviation: deviation.as_f64(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_hermitian<T: Real>(a: &ComplexMatrix<T>, op: &'static str) -> Result<(), LinalgError> {
    check_hermitian(a, op)
}

fn off_diagonal_sq<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Eigendecomposition `A = E diag(λ) Eᴴ` of a Hermitian matrix.
///
/// Eigenvalues come back in descending order. Within a run of tied eigenvalues the
/// eigenvectors are ordered by the index of their first significant component, and every
/// eigenvector is phase-rotated so that component is real and positive. The routine is
/// deterministic: identical input gives bit-identical output.
pub fn hermitian_evd<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianEvd<T>, LinalgError> {
    check_hermitian(a, "hermitian_evd")?;
    if !a.is_finite() {
        return Err(LinalgError::NonFinite { op: "hermitian_evd" });
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)].im = T::zero();
    }
    let mut v = ComplexMatrix::identity(n);
    let norm_sq = m.frobenius_norm_sq();
    let target = (T::eps() * T::eps()) * norm_sq;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_sq(&m);
        if off <= target || norm_sq.is_zero() {
            break;
        }
        if sweeps == MAX_SWEEPS {
            // Stalled at rounding level is acceptable, anything larger is not.
            if off <= T::lit(1e6) * target {
                break;
            }
            return Err(LinalgError::NoConvergence {
                sweeps,
                residual: off.sqrt().as_f64(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut values: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut vectors = v;
    for j in 0..n {
        fix_phase(vectors.col_mut(j));
    }

    let order = ordering(&values, &vectors);
    values = order.iter().map(|&i| values[i]).collect();
    let mut sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.col_mut(dst).copy_from_slice(vectors.col(src));
    }
    vectors = sorted;
    Ok(HermitianEvd { values, vectors })
}

/// One Jacobi rotation annihilating entry `(p, q)`.
fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag.is_zero() {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Unit phase of the off-diagonal entry; the rotation acts on the real problem after removing it.
    let phase = apq / mag;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let back = phase.conj();
    let n = m.rows();

    // Columns: M <- M J, with J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q).
    for r in 0..n {
        let xp = m[(r, p)];
        let xq = m[(r, q)];
        m[(r, p)] = xp * c - xq * back * s;
        m[(r, q)] = xp * s + xq * back * c;
    }
    // Rows: M <- Jᴴ M.
    for col in 0..n {
        let xp = m[(p, col)];
        let xq = m[(q, col)];
        m[(p, col)] = xp * c - xq * phase * s;
        m[(q, col)] = xp * s + xq * phase * c;
    }
    m[(p, q)] = Complex::zero();
    m[(q, p)] = Complex::zero();
    m[(p, p)] = Complex::new(app - t * mag, T::zero());
    m[(q, q)] = Complex::new(aqq + t * mag, T::zero());

    for r in 0..n {
        let xp = v[(r, p)];
        let xq = v[(r, q)];
        v[(r, p)] = xp * c - xq * back * s;
        v[(r, q)] = xp * s + xq * back * c;
    }
}

fn first_significant<T: Real>(col: &[Complex<T>]) -> usize {
    let peak = col.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let tol = T::lit(RANK_TOL) * peak;
    col.iter().position(|z| z.norm() > tol).unwrap_or(0)
}

/// Rotates the vector so its first significant component is real positive.
fn fix_phase<T: Real>(col: &mut [Complex<T>]) {
    let idx = first_significant(col);
    let z = col[idx];
    let mag = z.norm();
    if mag.is_zero() {
        return;
    }
    let rot = z.conj() / mag;
    for x in col.iter_mut() {
        *x *= rot;
    }
    col[idx] = Complex::new(mag, T::zero());
}

fn ordering<T: Real>(values: &[T], vectors: &ComplexMatrix<T>) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[b].as_f64().total_cmp(&values[a].as_f64()).then(a.cmp(&b)));
    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = T::lit(TIE_TOL) * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[idx[start]] - values[idx[end]]).abs() <= tol {
            end += 1;
        }
        idx[start..end].sort_by_key(|&i| (first_significant(vectors.col(i)), i));
        start = end;
    }
    idx
}

/// Ratio of the largest to the smallest eigenvalue of a Hermitian PSD matrix.
///
/// Returns `+inf` when the smallest eigenvalue is at or below the rank tolerance.
pub fn condition_number<T: Real>(a: &ComplexMatrix<T>) -> Result<T, LinalgError> {
    let evd = hermitian_evd(a)?;
    condition_from_spectrum(&evd.values)
}

pub(crate) fn condition_from_spectrum<T: Real>(values: &[T]) -> Result<T, LinalgError> {
    let max = values[0];
    let min = *values.last().expect("nonempty");
    if max <= T::zero() {
        return Err(LinalgError::ZeroMatrix { op: "condition_number" });
    }
    if min <= T::lit(RANK_TOL) * max {
        return Ok(T::infinity());
    }
    Ok(max / min)
}

/// Smallest and largest eigenvalue.
pub fn extreme_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<(T, T), LinalgError> {
    let evd = hermitian_evd(a)?;
    Ok((evd.min(), evd.max()))
}

/// Identity matrix helper used by callers building `I + c X`.
pub(crate) fn shifted_identity<T: Real>(x: &ComplexMatrix<T>, c: T) -> ComplexMatrix<T> {
    let mut out = x.scale_real(c);
    out.add_diagonal(Complex::one());
    out
}
