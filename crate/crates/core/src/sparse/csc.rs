use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Compressed sparse column matrix. Row indices are sorted within each column
/// and duplicates are summed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Csc<T = f64> {
    nrows: usize,
    ncols: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> Csc<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csc {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowidx: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Csc {
            nrows: n,
            ncols: n,
            colptr: (0..=n).collect(),
            rowidx: (0..n).collect(),
            vals: vec![T::ONE; n],
        }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, trip: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; ncols + 1];
        for &(i, j, v) in trip {
            if i >= nrows || j >= ncols {
                return Err(Error::DimensionMismatch("triplet index out of range"));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            counts[j + 1] += 1;
        }
        for j in 0..ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut rows = vec![0usize; trip.len()];
        let mut vals = vec![T::ZERO; trip.len()];
        for &(i, j, v) in trip {
            let p = next[j];
            rows[p] = i;
            vals[p] = v;
            next[j] += 1;
        }
        let mut colptr = vec![0usize; ncols + 1];
        let mut rowidx = Vec::with_capacity(trip.len());
        let mut out = Vec::with_capacity(trip.len());
        let mut entries: Vec<(usize, T)> = Vec::new();
        for j in 0..ncols {
            entries.clear();
            entries.extend((counts[j]..counts[j + 1]).map(|p| (rows[p], vals[p])));
            entries.sort_by_key(|e| e.0);
            for &(i, v) in entries.iter() {
                if rowidx.len() > colptr[j] && *rowidx.last().unwrap() == i {
                    *out.last_mut().unwrap() += v;
                } else {
                    rowidx.push(i);
                    out.push(v);
                }
            }
            colptr[j + 1] = rowidx.len();
        }
        Ok(Csc {
            nrows,
            ncols,
            colptr,
            rowidx,
            vals: out,
        })
    }

    /// Raw constructor; caller guarantees sorted, unique row indices per column.
    pub(crate) fn from_parts(
        nrows: usize,
        ncols: usize,
        colptr: Vec<usize>,
        rowidx: Vec<usize>,
        vals: Vec<T>,
    ) -> Self {
        debug_assert_eq!(colptr.len(), ncols + 1);
        debug_assert_eq!(rowidx.len(), vals.len());
        Csc {
            nrows,
            ncols,
            colptr,
            rowidx,
            vals,
        }
    }

    /// Sparse copy of a dense matrix (exact zeros dropped).
    pub fn from_dense(a: &Mat<T>) -> Self {
        let mut colptr = vec![0usize; a.ncols() + 1];
        let mut rowidx = Vec::new();
        let mut vals = Vec::new();
        for j in 0..a.ncols() {
            for (i, &v) in a.col(j).iter().enumerate() {
                if v != T::ZERO {
                    rowidx.push(i);
                    vals.push(v);
                }
            }
            colptr[j + 1] = rowidx.len();
        }
        Csc {
            nrows: a.nrows(),
            ncols: a.ncols(),
            colptr,
            rowidx,
            vals,
        }
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            for p in self.colptr[j]..self.colptr[j + 1] {
                m[(self.rowidx[p], j)] += self.vals[p];
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }
    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }
    #[inline]
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }
    pub fn rowidx(&self) -> &[usize] {
        &self.rowidx
    }
    pub fn values(&self) -> &[T] {
        &self.vals
    }

    /// `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.colptr[j]..self.colptr[j + 1];
        self.rowidx[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    /// Triplets in column-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        let mut t = Vec::with_capacity(self.nnz());
        for j in 0..self.ncols {
            for (i, v) in self.column(j) {
                t.push((i, j, v));
            }
        }
        t
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.nrows + 1];
        for &i in &self.rowidx {
            counts[i + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut rowidx = vec![0usize; self.nnz()];
        let mut vals = vec![T::ZERO; self.nnz()];
        for j in 0..self.ncols {
            for (i, v) in self.column(j) {
                let p = next[i];
                rowidx[p] = j;
                vals[p] = v;
                next[i] += 1;
            }
        }
        Csc {
            nrows: self.ncols,
            ncols: self.nrows,
            colptr: counts,
            rowidx,
            vals,
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![T::ZERO; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::ZERO {
                continue;
            }
            for (i, v) in self.column(j) {
                y[i] += v * xj;
            }
        }
        y
    }

    /// `y = A^T x`.
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows);
        (0..self.ncols)
            .map(|j| self.column(j).fold(T::ZERO, |s, (i, v)| s + v * x[i]))
            .collect()
    }

    pub fn mul_mat(&self, x: &Mat<T>) -> Mat<T> {
        assert_eq!(x.nrows(), self.ncols, "sparse matmul: inner dimension");
        let mut out = Mat::zeros(self.nrows, x.ncols());
        for c in 0..x.ncols() {
            let y = self.mul_vec(x.col(c));
            out.col_mut(c).copy_from_slice(&y);
        }
        out
    }

    pub fn tr_mul_mat(&self, x: &Mat<T>) -> Mat<T> {
        assert_eq!(x.nrows(), self.nrows, "sparse matmul: inner dimension");
        let mut out = Mat::zeros(self.ncols, x.ncols());
        for c in 0..x.ncols() {
            let y = self.tr_mul_vec(x.col(c));
            out.col_mut(c).copy_from_slice(&y);
        }
        out
    }

    /// `alpha * self + beta * other` (same shape).
    pub fn lin_comb(&self, alpha: T, other: &Self, beta: T) -> Self {
        assert_eq!(self.shape(), other.shape(), "sparse lin_comb: shape");
        let mut colptr = vec![0usize; self.ncols + 1];
        let mut rowidx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() + other.nnz());
        for j in 0..self.ncols {
            let (mut p, pe) = (self.colptr[j], self.colptr[j + 1]);
            let (mut q, qe) = (other.colptr[j], other.colptr[j + 1]);
            while p < pe || q < qe {
                let ip = if p < pe { self.rowidx[p] } else { usize::MAX };
                let iq = if q < qe { other.rowidx[q] } else { usize::MAX };
                if ip == iq {
                    rowidx.push(ip);
                    vals.push(alpha * self.vals[p] + beta * other.vals[q]);
                    p += 1;
                    q += 1;
                } else if ip < iq {
                    rowidx.push(ip);
                    vals.push(alpha * self.vals[p]);
                    p += 1;
                } else {
                    rowidx.push(iq);
                    vals.push(beta * other.vals[q]);
                    q += 1;
                }
            }
            colptr[j + 1] = rowidx.len();
        }
        Csc {
            nrows: self.nrows,
            ncols: self.ncols,
            colptr,
            rowidx,
            vals,
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v = *v * s);
        out
    }

    /// Copy of rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.nrows && c0 <= c1 && c1 <= self.ncols);
        let mut colptr = vec![0usize; c1 - c0 + 1];
        let mut rowidx = Vec::new();
        let mut vals = Vec::new();
        for j in c0..c1 {
            for (i, v) in self.column(j) {
                if i >= r0 && i < r1 {
                    rowidx.push(i - r0);
                    vals.push(v);
                }
            }
            colptr[j - c0 + 1] = rowidx.len();
        }
        Csc {
            nrows: r1 - r0,
            ncols: c1 - c0,
            colptr,
            rowidx,
            vals,
        }
    }

    /// Assemble `[[a, b], [c, d]]`.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.nrows != b.nrows || c.nrows != d.nrows || a.ncols != c.ncols || b.ncols != d.ncols {
            return Err(Error::DimensionMismatch("block2x2 block shapes"));
        }
        let (n1, n2) = (a.ncols, b.ncols);
        let top = a.nrows;
        let mut colptr = vec![0usize; n1 + n2 + 1];
        let mut rowidx = Vec::with_capacity(a.nnz() + b.nnz() + c.nnz() + d.nnz());
        let mut vals = Vec::with_capacity(rowidx.capacity());
        for j in 0..n1 + n2 {
            let (upper, lower) = if j < n1 { (a, c) } else { (b, d) };
            let jj = if j < n1 { j } else { j - n1 };
            for (i, v) in upper.column(jj) {
                rowidx.push(i);
                vals.push(v);
            }
            for (i, v) in lower.column(jj) {
                rowidx.push(top + i);
                vals.push(v);
            }
            colptr[j + 1] = rowidx.len();
        }
        Ok(Csc {
            nrows: top + c.nrows,
            ncols: n1 + n2,
            colptr,
            rowidx,
            vals,
        })
    }

    pub fn norm_1(&self) -> f64 {
        (0..self.ncols)
            .map(|j| self.column(j).map(|(_, v)| v.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| f64::max(m, v.modulus()))
    }

    pub fn is_finite(&self) -> bool {
        self.vals.iter().all(|v| v.is_finite())
    }

    pub fn diagonal(&self) -> Vec<T> {
        let n = self.nrows.min(self.ncols);
        let mut d = vec![T::ZERO; n];
        for (j, dj) in d.iter_mut().enumerate() {
            for (i, v) in self.column(j) {
                if i == j {
                    *dj += v;
                }
            }
        }
        d
    }
}

impl Csc<f64> {
    /// Entry-wise conversion into another scalar type.
    pub fn cast<T: Scalar>(&self) -> Csc<T> {
        Csc {
            nrows: self.nrows,
            ncols: self.ncols,
            colptr: self.colptr.clone(),
            rowidx: self.rowidx.clone(),
            vals: self.vals.iter().map(|&v| T::from_real(v)).collect(),
        }
    }

    pub fn to_complex(&self) -> Csc<Complex64> {
        Csc {
            nrows: self.nrows,
            ncols: self.ncols,
            colptr: self.colptr.clone(),
            rowidx: self.rowidx.clone(),
            vals: self.vals.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Structural and numerical symmetry to a relative tolerance.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let t = self.transpose();
        let d = self.lin_comb(1.0, &t, -1.0);
        d.max_abs() <= tol * self.max_abs()
    }
}
