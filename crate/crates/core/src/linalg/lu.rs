use alloc::vec::Vec;

use super::Mat;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T = f64> {
    lu: Mat<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Mat<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("LU of a non-square matrix"));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = a.nrows();
        let tiny = f64::EPSILON * a.norm_1();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].modulus();
            for i in k + 1..n {
                let v = lu[(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tiny || best == 0.0 {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= piv;
            }
            let data = lu.as_mut_slice();
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let lcol = &head[k * n..];
            for j in k + 1..n {
                let col = &mut tail[(j - k - 1) * n..(j - k) * n];
                let akj = col[k];
                if akj == T::ZERO {
                    continue;
                }
                for i in k + 1..n {
                    col[i] -= lcol[i] * akj;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    /// Solve `A x = b` in place for a single right-hand side.
    pub fn solve_vec(&self, b: &mut [T]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for k in 0..n {
            let xk = x[k];
            if xk != T::ZERO {
                let col = self.lu.col(k);
                for i in k + 1..n {
                    x[i] -= col[i] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            x[k] /= col[k];
            let xk = x[k];
            if xk != T::ZERO {
                for i in 0..k {
                    x[i] -= col[i] * xk;
                }
            }
        }
        b.copy_from_slice(&x);
    }

    /// Solve `A^T x = b` in place (plain transpose).
    pub fn solve_transpose_vec(&self, b: &mut [T]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        // U^T z = b
        for k in 0..n {
            let col = self.lu.col(k);
            let mut s = y[k];
            for i in 0..k {
                s -= col[i] * y[i];
            }
            y[k] = s / col[k];
        }
        // L^T w = z
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            let mut s = y[k];
            for i in k + 1..n {
                s -= col[i] * y[i];
            }
            y[k] = s;
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = y[i];
        }
    }

    pub fn solve(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        if rhs.nrows() != self.dim() {
            return Err(Error::DimensionMismatch("LU solve: RHS rows"));
        }
        let mut x = rhs.clone();
        for j in 0..x.ncols() {
            self.solve_vec(x.col_mut(j));
        }
        Ok(x)
    }

    pub fn solve_transpose(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        if rhs.nrows() != self.dim() {
            return Err(Error::DimensionMismatch("LU solve: RHS rows"));
        }
        let mut x = rhs.clone();
        for j in 0..x.ncols() {
            self.solve_transpose_vec(x.col_mut(j));
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Mat<T> {
        self.solve(&Mat::identity(self.dim()))
            .expect("square identity")
    }

    /// Cheap reciprocal condition proxy `min|u_ii| / max|u_ii|`.
    pub fn pivot_ratio(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let d = self.lu[(i, i)].modulus();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        lo / hi
    }
}

/// Solve `A X = RHS`.
pub fn lu_solve<T: Scalar>(a: &Mat<T>, rhs: &Mat<T>) -> Result<Mat<T>> {
    if rhs.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch("lu_solve: RHS rows"));
    }
    Lu::factor(a)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rng};
    use num_complex::Complex64;

    #[test]
    fn identity_returns_rhs() {
        let b = Mat::col_vector(&[1.0, -2.0, 3.5]);
        assert_eq!(lu_solve(&Mat::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn diagonal() {
        let a = Mat::diag(&[2.0, 4.0]);
        let x = lu_solve(&a, &Mat::col_vector(&[2.0, 4.0])).unwrap();
        assert_eq!(x, Mat::col_vector(&[1.0, 1.0]));
    }

    #[test]
    fn random_residual() {
        let mut r = rng(1);
        let a = rand_mat(&mut r, 8, 8).add(&Mat::identity(8).scaled(4.0));
        let b = rand_mat(&mut r, 8, 1);
        let x = lu_solve(&a, &b).unwrap();
        let res = a.matmul(&x).sub(&b).norm_fro();
        assert!(res <= 1e-10 * b.norm_fro(), "residual {res}");
        let xt = Lu::factor(&a).unwrap().solve_transpose(&b).unwrap();
        assert!(a.transpose().matmul(&xt).sub(&b).norm_fro() <= 1e-10 * b.norm_fro());
    }

    #[test]
    fn complex_scalar() {
        let a = Mat::from_rows(&[&[Complex64::new(-2.0, -1.0)]]);
        let x = lu_solve(&a, &Mat::from_rows(&[&[Complex64::new(1.0, 0.0)]])).unwrap();
        let expect = Complex64::new(1.0, 0.0) / Complex64::new(-2.0, -1.0);
        assert!((x[(0, 0)] - expect).norm() < 1e-15);
    }

    #[test]
    fn singular_detected() {
        let a = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(Lu::factor(&a).unwrap_err(), Error::SingularMatrix);
        assert_eq!(
            Lu::factor(&Mat::<f64>::zeros(2, 2)).unwrap_err(),
            Error::SingularMatrix
        );
    }
}
