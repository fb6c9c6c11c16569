//! Entrywise, Kronecker and column-wise Kronecker products, plus column stacking.

use super::{ComplexMatrix, LinalgError};
use crate::Real;

/// Entrywise product `A ∘ B`.
pub fn hadamard<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, LinalgError> {
    if a.shape() != b.shape() {
        return Err(LinalgError::DimensionMismatch {
            op: "hadamard",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let data = a.as_slice().iter().zip(b.as_slice()).map(|(&x, &y)| x * y).collect();
    ComplexMatrix::from_col_major(a.rows(), a.cols(), data)
}

/// Kronecker product: block `(i, j)` of the result is `a[i, j] * b`.
pub fn kronecker<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for q in 0..bc {
            let col = out.col_mut(j * bc + q);
            for i in 0..ar {
                let aij = a[(i, j)];
                for (p, &bpq) in b.col(q).iter().enumerate() {
                    col[i * br + p] = aij * bpq;
                }
            }
        }
    }
    out
}

/// Khatri-Rao product: column `l` is `a[:, l] ⊗ b[:, l]`.
pub fn khatri_rao<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, LinalgError> {
    if a.cols() != b.cols() {
        return Err(LinalgError::DimensionMismatch {
            op: "khatri_rao",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (ar, br) = (a.rows(), b.rows());
    let mut out = ComplexMatrix::zeros(ar * br, a.cols());
    for l in 0..a.cols() {
        let bcol = b.col(l);
        let dst = out.col_mut(l);
        for (i, &x) in a.col(l).iter().enumerate() {
            for (p, &y) in bcol.iter().enumerate() {
                dst[i * br + p] = x * y;
            }
        }
    }
    Ok(out)
}

/// Column stacking into a single column.
pub fn vec<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    ComplexMatrix::from_col_major(a.rows() * a.cols(), 1, a.as_slice().to_vec()).expect("nonempty matrix")
}

/// Inverse of [`vec`].
pub fn unvec<T: Real>(v: &ComplexMatrix<T>, rows: usize, cols: usize) -> Result<ComplexMatrix<T>, LinalgError> {
    let len = v.rows() * v.cols();
    if len != rows * cols {
        return Err(LinalgError::Reshape { len, rows, cols });
    }
    ComplexMatrix::from_col_major(rows, cols, v.as_slice().to_vec())
}
