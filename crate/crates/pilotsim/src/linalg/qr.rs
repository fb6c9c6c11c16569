//! Thin QR by modified Gram-Schmidt with one reorthogonalization pass.

use num_complex::Complex;
use num_traits::Zero;

use super::{ComplexMatrix, LinalgError, RANK_TOL};
use crate::Real;

/// `A = Q R` with orthonormal `Q` (rows × rank) and `R` (rank × cols).
///
/// Columns that are numerically dependent on earlier ones do not add a column to `Q`.
#[derive(Debug, Clone)]
pub struct ThinQr<T> {
    pub q: ComplexMatrix<T>,
    pub r: ComplexMatrix<T>,
}

impl<T: Real> ThinQr<T> {
    pub fn rank(&self) -> usize {
        self.q.cols()
    }
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

/// Removes the components of `v` along the orthonormal `basis`, twice. Returns accumulated projections.
fn project_out<T: Real>(basis: &[Vec<Complex<T>>], v: &mut [Complex<T>]) -> Vec<Complex<T>> {
    let mut coeffs = vec![Complex::zero(); basis.len()];
    for _ in 0..2 {
        for (c, q) in coeffs.iter_mut().zip(basis) {
            let p = dot(q, v);
            *c += p;
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= *qi * p);
        }
    }
    coeffs
}

pub fn thin_qr<T: Real>(a: &ComplexMatrix<T>) -> Result<ThinQr<T>, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite { op: "thin_qr" });
    }
    let (rows, cols) = a.shape();
    let scale = (0..cols).map(|j| norm(a.col(j))).fold(T::zero(), T::max);
    let tol = T::lit(RANK_TOL).sqrt() * scale;
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    let mut r_cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = a.col(j).to_vec();
        let mut coeffs = project_out(&basis, &mut v);
        let nv = norm(&v);
        if nv > tol && basis.len() < rows {
            let inv = T::one() / nv;
            v.iter_mut().for_each(|x| *x *= inv);
            basis.push(v);
            coeffs.push(Complex::new(nv, T::zero()));
        }
        r_cols.push(coeffs);
    }
    let rank = basis.len();
    if rank == 0 {
        return Err(LinalgError::ZeroMatrix { op: "thin_qr" });
    }
    let q = ComplexMatrix::from_col_major(rows, rank, basis.concat())?;
    let r = ComplexMatrix::from_fn(rank, cols, |i, j| {
        r_cols[j].get(i).copied().unwrap_or_else(Complex::zero)
    });
    Ok(ThinQr { q, r })
}

/// `count` orthonormal columns orthogonal to the orthonormal columns of `basis`.
///
/// Built by Gram-Schmidt over the standard basis vectors in index order.
pub fn orthonormal_complement<T: Real>(
    basis: &ComplexMatrix<T>,
    count: usize,
) -> Result<ComplexMatrix<T>, LinalgError> {
    let (rows, have) = basis.shape();
    if have + count > rows {
        return Err(LinalgError::DimensionMismatch {
            op: "orthonormal_complement",
            left: (rows, have),
            right: (rows, count),
        });
    }
    let mut all: Vec<Vec<Complex<T>>> = (0..have).map(|j| basis.col(j).to_vec()).collect();
    let mut added = Vec::with_capacity(count);
    let accept = T::lit(1e-6);
    for i in 0..rows {
        if added.len() == count {
            break;
        }
        let mut v = vec![Complex::zero(); rows];
        v[i] = Complex::new(T::one(), T::zero());
        project_out(&all, &mut v);
        let nv = norm(&v);
        if nv > accept {
            let inv = T::one() / nv;
            v.iter_mut().for_each(|x| *x *= inv);
            all.push(v.clone());
            added.push(v);
        }
    }
    if added.len() < count {
        return Err(LinalgError::Singular {
            pivot: 0.0,
            index: added.len(),
        });
    }
    if count == 0 {
        return Err(LinalgError::EmptyMatrix { rows, cols: 0 });
    }
    ComplexMatrix::from_col_major(rows, count, added.concat())
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn reconstructs_full_rank() {
        let a = M::from_fn(5, 3, |i, j| {
            c(
                (i * 3 + j) as f64 % 7.0 - 2.0,
                (i as f64 - j as f64) * 0.3 + (i * j) as f64 * 0.1,
            )
        });
        let f = thin_qr(&a).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(f.q.matmul(&f.r).unwrap().relative_distance(&a).unwrap() < 1e-13);
        assert!(f.q.gram().relative_distance(&M::identity(3)).unwrap() < 1e-14);
    }

    #[test]
    fn drops_dependent_column() {
        let a = M::from_fn(4, 3, |i, j| {
            if j == 2 {
                c(2.0 * (i as f64 + 1.0), 0.0)
            } else {
                c(if j == 0 { i as f64 + 1.0 } else { (i * i) as f64 }, 0.0)
            }
        });
        let f = thin_qr(&a).unwrap();
        assert_eq!(f.rank(), 2);
        assert_eq!(f.r.shape(), (2, 3));
        assert!(f.q.matmul(&f.r).unwrap().relative_distance(&a).unwrap() < 1e-13);
    }

    #[test]
    fn complement_is_orthogonal() {
        let a = M::from_fn(4, 2, |i, j| c(1.0 + (i + j) as f64, (i as f64) * 0.5));
        let q = thin_qr(&a).unwrap().q;
        let comp = orthonormal_complement(&q, 2).unwrap();
        let all = M::hstack(&[&q, &comp]).unwrap();
        assert!(all.gram().relative_distance(&M::identity(4)).unwrap() < 1e-13);
        assert!(orthonormal_complement(&q, 3).is_err());
    }

    #[test]
    fn zero_matrix_rejected() {
        assert!(thin_qr(&M::zeros(3, 2)).is_err());
    }
}
