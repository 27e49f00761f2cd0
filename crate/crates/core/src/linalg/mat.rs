use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense column-major matrix.
#[derive(Clone, PartialEq, Default)]
pub struct Mat<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Complex dense matrix.
pub type CMat = Mat<Complex64>;

impl<T: core::fmt::Debug> core::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Checked constructor from column-major storage. Rejects NaN/Inf.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("entry count != rows * cols"));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Mat { rows, cols, data })
    }

    /// Checked constructor from row-major storage (handy for literals).
    pub fn from_row_major(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("entry count != rows * cols"));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_fn(rows, cols, |i, j| data[i * cols + j]))
    }

    /// Row-major literal constructor that panics on bad input; intended for tests and constants.
    pub fn from_rows(rows: &[&[T]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn col_vector(values: &[T]) -> Self {
        Mat {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn column(&self, j: usize) -> Self {
        Mat::col_vector(self.col(j))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "add: shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "sub: shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "axpy: shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        let r = self.rows;
        for j in 0..other.cols {
            let oc = &mut out.data[j * r..(j + 1) * r];
            for k in 0..self.cols {
                let b = other.data[j * other.rows + k];
                if b == T::ZERO {
                    continue;
                }
                let ac = &self.data[k * r..(k + 1) * r];
                for (o, &a) in oc.iter_mut().zip(ac) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^T * other` (plain transpose, no conjugation).
    pub fn tr_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "tr_matmul: row mismatch");
        Self::from_fn(self.cols, other.cols, |i, j| {
            self.col(i)
                .iter()
                .zip(other.col(j))
                .fold(T::ZERO, |acc, (&a, &b)| acc + a * b)
        })
    }

    /// `self^H * other`.
    pub fn adj_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adj_matmul: row mismatch");
        Self::from_fn(self.cols, other.cols, |i, j| {
            self.col(i)
                .iter()
                .zip(other.col(j))
                .fold(T::ZERO, |acc, (&a, &b)| acc + a.conj() * b)
        })
    }

    /// `self * other^T`.
    pub fn matmul_tr(&self, other: &Self) -> Self {
        self.matmul(&other.transpose())
    }

    /// Copy of rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn columns(&self, c0: usize, c1: usize) -> Self {
        assert!(c0 <= c1 && c1 <= self.cols);
        Mat {
            rows: self.rows,
            cols: c1 - c0,
            data: self.data[c0 * self.rows..c1 * self.rows].to_vec(),
        }
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for j in 0..block.cols {
            for i in 0..block.rows {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// `[self, other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        if self.cols == 0 {
            return other.clone();
        }
        if other.cols == 0 {
            return self.clone();
        }
        assert_eq!(self.rows, other.rows, "hcat: row mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        }
    }

    /// `[self; other]`.
    pub fn vcat(&self, other: &Self) -> Self {
        if self.rows == 0 {
            return other.clone();
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols, "vcat: column mismatch");
        let mut out = Self::zeros(self.rows + other.rows, self.cols);
        out.set_submatrix(0, 0, self);
        out.set_submatrix(self.rows, 0, other);
        out
    }

    /// Append columns in place.
    pub fn push_columns(&mut self, other: &Self) {
        if self.cols == 0 && self.rows == 0 {
            *self = other.clone();
            return;
        }
        assert_eq!(self.rows, other.rows, "push_columns: row mismatch");
        self.data.extend_from_slice(&other.data);
        self.cols += other.cols;
    }

    /// Zero-pad (or truncate) to `rows` rows.
    pub fn resized_rows(&self, rows: usize) -> Self {
        Self::from_fn(rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)]
            } else {
                T::ZERO
            }
        })
    }

    pub fn norm_fro(&self) -> f64 {
        // scaled sum of squares to avoid overflow
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self
            .data
            .iter()
            .map(|x| x.scale(1.0 / scale).modulus_sqr())
            .sum();
        scale * libm::sqrt(s)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| f64::max(m, x.modulus()))
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| self.col(j).iter().map(|x| x.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0; self.rows];
        for j in 0..self.cols {
            for (s, x) in sums.iter_mut().zip(self.col(j)) {
                *s += x.modulus();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::ZERO, |acc, i| acc + self[(i, i)])
    }
}

impl Mat<f64> {
    /// `(A + A^T) / 2`.
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    /// Entry-wise conversion into another scalar type.
    pub fn cast<T: Scalar>(&self) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| T::from_real(x)).collect(),
        }
    }

    pub fn to_complex(&self) -> CMat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Spectral norm (largest singular value).
    pub fn norm2(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        match super::svd::singular_values(self) {
            Ok(s) => s.first().copied().unwrap_or(0.0),
            Err(_) => self.norm_fro(),
        }
    }

    /// Spectral norm of a symmetric matrix via its extreme eigenvalues.
    pub fn norm2_sym(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        match super::symeig::sym_eigvals(&self.symmetrized()) {
            Ok(v) => v.iter().fold(0.0, |m, x| f64::max(m, libm::fabs(*x))),
            Err(_) => self.norm_fro(),
        }
    }
}

impl CMat {
    pub fn real_part(&self) -> Mat<f64> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.re).collect(),
        }
    }

    pub fn imag_part(&self) -> Mat<f64> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.im).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_non_finite() {
        assert_eq!(
            Mat::from_col_major(1, 2, alloc::vec![1.0, f64::NAN]),
            Err(Error::NonFinite)
        );
        assert!(matches!(
            Mat::<f64>::from_col_major(2, 2, alloc::vec![1.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn products_agree() {
        let a = Mat::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let b = Mat::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let c = a.matmul(&b);
        assert_eq!(c, Mat::from_rows(&[&[4.0, 5.0], &[10.0, 11.0]]));
        assert_eq!(a.transpose().tr_matmul(&b), c);
        assert_eq!(a.matmul_tr(&b.transpose()), c);
    }

    #[test]
    fn norms() {
        let a = Mat::from_rows(&[&[3.0, 0.0], &[4.0, 0.0]]);
        assert!((a.norm_fro() - 5.0).abs() < 1e-15);
        assert!((a.norm2() - 5.0).abs() < 1e-14);
        assert_eq!(a.norm_1(), 7.0);
        assert_eq!(a.norm_inf(), 4.0);
    }
}
