use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use super::LinalgError;
use crate::Real;

/// Dense complex matrix, column-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// All-zero matrix. Panics on a zero dimension.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[i + j * rows] = f(i, j);
            }
        }
        m
    }

    /// Wraps column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::Reshape {
                len: data.len(),
                rows,
                cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(LinalgError::EmptyMatrix { rows: r, cols: c });
        }
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch {
                op: "from_rows",
                left: (1, c),
                right: (1, bad.len()),
            });
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Builds a real-valued matrix from rows.
    pub fn from_real_rows(rows: &[&[T]]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex::new(x, T::zero())).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn column_vector(entries: Vec<Complex<T>>) -> Result<Self, LinalgError> {
        let n = entries.len();
        Self::from_col_major(n, 1, entries)
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[Complex<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex<T>] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Copy of columns `start..start+count`.
    pub fn columns(&self, start: usize, count: usize) -> Self {
        assert!(start + count <= self.cols, "column range out of bounds");
        Self {
            rows: self.rows,
            cols: count,
            data: self.data[start * self.rows..(start + count) * self.rows].to_vec(),
        }
    }

    /// Copy of rows `start..start+count`.
    pub fn row_block(&self, start: usize, count: usize) -> Self {
        assert!(start + count <= self.rows, "row range out of bounds");
        Self::from_fn(count, self.cols, |i, j| self[(start + i, j)])
    }

    /// Copy of the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of bounds");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, src: &Self) {
        assert!(
            r0 + src.rows <= self.rows && c0 + src.cols <= self.cols,
            "block out of bounds"
        );
        for j in 0..src.cols {
            for i in 0..src.rows {
                self[(r0 + i, c0 + j)] = src[(i, j)];
            }
        }
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[&Self]) -> Result<Self, LinalgError> {
        let first = parts.first().ok_or(LinalgError::EmptyMatrix { rows: 0, cols: 0 })?;
        let rows = first.rows;
        let mut data = Vec::new();
        for p in parts {
            if p.rows != rows {
                return Err(LinalgError::DimensionMismatch {
                    op: "hstack",
                    left: first.shape(),
                    right: p.shape(),
                });
            }
            data.extend_from_slice(&p.data);
        }
        let cols = data.len() / rows;
        Self::from_col_major(rows, cols, data)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    fn check_same(&self, other: &Self, op: &'static str) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same(other, "add")?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same(other, "sub")?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a -= b);
        Ok(out)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: Complex<T>, other: &Self) -> Result<(), LinalgError> {
        self.check_same(other, "axpy")?;
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, &b)| *a += alpha * b);
        Ok(())
    }

    /// Adds `s` to every diagonal entry.
    pub fn add_diagonal(&mut self, s: Complex<T>) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += s;
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (p, &b) in other.col(j).iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (d, &a) in dst.iter_mut().zip(self.col(p)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᴴ * other` without forming the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "adjoint_mul",
                left: (self.cols, self.rows),
                right: other.shape(),
            });
        }
        Ok(Self::from_fn(self.cols, other.cols, |i, j| {
            self.col(i)
                .iter()
                .zip(other.col(j))
                .fold(Complex::zero(), |acc, (&a, &b)| acc + a.conj() * b)
        }))
    }

    /// `self * otherᴴ`.
    pub fn mul_adjoint(&self, other: &Self) -> Result<Self, LinalgError> {
        self.matmul(&other.adjoint())
    }

    /// Gram matrix `selfᴴ self`.
    pub fn gram(&self) -> Self {
        self.adjoint_mul(self).expect("gram is always conformable")
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[Complex<T>]) -> Result<Self, LinalgError> {
        if d.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "scale_rows",
                left: (d.len(), d.len()),
                right: self.shape(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| d[i] * self[(i, j)]))
    }

    /// `self * diag(d)`.
    pub fn scale_cols(&self, d: &[Complex<T>]) -> Result<Self, LinalgError> {
        if d.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "scale_cols",
                left: self.shape(),
                right: (d.len(), d.len()),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j]))
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex<T> {
        self.diagonal().into_iter().fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm_sq(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `|a_ij - conj(a_ji)|` relative to the largest entry; zero for the zero matrix.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let scale = self.max_abs();
        if scale.is_zero() {
            return T::zero();
        }
        let mut dev = T::zero();
        for j in 0..self.cols {
            for i in 0..=j {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev / scale
    }

    pub fn is_hermitian(&self, rel_tol: T) -> bool {
        self.hermitian_deviation() <= rel_tol
    }

    /// `(A + Aᴴ) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Frobenius distance relative to the norm of `reference`.
    pub fn relative_distance(&self, reference: &Self) -> Result<T, LinalgError> {
        let diff = self.sub(reference)?.frobenius_norm();
        let norm = reference.frobenius_norm();
        Ok(if norm.is_zero() { diff } else { diff / norm })
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn re(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn matmul_and_adjoint_mul_agree() {
        let a = M::from_fn(3, 2, |i, j| Complex::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = M::from_fn(3, 4, |i, j| Complex::new((i * j) as f64, 1.0));
        let left = a.adjoint().matmul(&b).unwrap();
        let right = a.adjoint_mul(&b).unwrap();
        assert!(left.relative_distance(&right).unwrap() < 1e-15);
    }

    #[test]
    fn matmul_known_product() {
        let a = M::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = M::from_real_rows(&[&[5.0, 6.0], &[7.0, 8.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c, M::from_real_rows(&[&[19.0, 22.0], &[43.0, 50.0]]).unwrap());
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = M::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(LinalgError::DimensionMismatch { .. })));
        assert!(a.add(&M::zeros(3, 2)).is_err());
        assert!(M::from_col_major(2, 2, vec![re(1.0); 3]).is_err());
        assert!(M::from_col_major(0, 2, vec![]).is_err());
    }

    #[test]
    fn hermitian_deviation_detects_asymmetry() {
        let mut a = M::identity(3);
        assert_eq!(a.hermitian_deviation(), 0.0);
        a[(0, 1)] = Complex::new(0.0, 1.0);
        a[(1, 0)] = Complex::new(0.0, -1.0);
        assert_eq!(a.hermitian_deviation(), 0.0);
        a[(1, 0)] = Complex::new(0.0, 1.0);
        assert!(a.hermitian_deviation() > 1.0);
    }

    #[test]
    fn hstack_and_blocks() {
        let a = M::identity(2);
        let b = M::from_fn(2, 1, |i, _| re(i as f64));
        let s = M::hstack(&[&a, &b]).unwrap();
        assert_eq!(s.shape(), (2, 3));
        assert_eq!(s.columns(2, 1), b);
        assert_eq!(s.block(0, 0, 2, 2), a);
        assert_eq!(s.row_block(1, 1)[(0, 2)], re(1.0));
    }
}
