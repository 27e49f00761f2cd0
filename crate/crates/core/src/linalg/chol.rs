use super::Mat;
use crate::error::{Error, Result};

/// Cholesky factor `A = L L^T` of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Mat,
}

impl Cholesky {
    pub fn factor(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("Cholesky of a non-square matrix"));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = a.nrows();
        let scale = a.max_abs();
        if a.sub(&a.transpose()).max_abs() > 1e-12 * scale {
            return Err(Error::NotSpd);
        }
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > f64::EPSILON * scale) {
                return Err(Error::NotSpd);
            }
            let d = libm::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn l(&self) -> &Mat {
        &self.l
    }

    pub fn into_l(self) -> Mat {
        self.l
    }

    /// `L^{-1} B`.
    pub fn solve_lower(&self, b: &Mat) -> Mat {
        let n = self.l.nrows();
        assert_eq!(b.nrows(), n);
        let mut x = b.clone();
        for c in 0..x.ncols() {
            let col = x.col_mut(c);
            for i in 0..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.l[(i, k)] * col[k];
                }
                col[i] = s / self.l[(i, i)];
            }
        }
        x
    }

    /// `L^{-T} B`.
    pub fn solve_upper(&self, b: &Mat) -> Mat {
        let n = self.l.nrows();
        assert_eq!(b.nrows(), n);
        let mut x = b.clone();
        for c in 0..x.ncols() {
            let col = x.col_mut(c);
            for i in (0..n).rev() {
                let lc = self.l.col(i);
                let mut s = col[i];
                for k in i + 1..n {
                    s -= lc[k] * col[k];
                }
                col[i] = s / lc[i];
            }
        }
        x
    }

    /// `A^{-1} B`.
    pub fn solve(&self, b: &Mat) -> Mat {
        self.solve_upper(&self.solve_lower(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rng};

    #[test]
    fn scalar() {
        let c = Cholesky::factor(&Mat::from_rows(&[&[4.0]])).unwrap();
        assert_eq!(c.l()[(0, 0)], 2.0);
    }

    #[test]
    fn random_spd() {
        let mut r = rng(5);
        let g = rand_mat(&mut r, 6, 6);
        let a = g.matmul_tr(&g).add(&Mat::identity(6));
        let c = Cholesky::factor(&a).unwrap();
        assert!(c.l().matmul_tr(c.l()).sub(&a).max_abs() < 1e-13);
        let b = rand_mat(&mut r, 6, 2);
        assert!(a.matmul(&c.solve(&b)).sub(&b).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let a = Mat::diag(&[1.0, -1.0]);
        assert_eq!(Cholesky::factor(&a).unwrap_err(), Error::NotSpd);
        let a = Mat::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert_eq!(Cholesky::factor(&a).unwrap_err(), Error::NotSpd);
    }
}
