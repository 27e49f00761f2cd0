use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{gen_eig, CMat, Lu, Mat};
use crate::C64;

/// Condition number of `X` above which the eigen-representation is rejected.
pub const MAX_EIGVEC_CONDITION: f64 = 1e8;

/// Single-input system in eigencoordinates: `A = X diag(lambda) X^{-1}`, `w = X^{-1} b`.
#[derive(Clone, Debug)]
pub struct DiagonalizedSystem {
    pub lambda: Vec<C64>,
    pub x: CMat,
    pub w: Vec<C64>,
    /// `X diag(w)`.
    pub xb: CMat,
    /// 1-norm condition number of `X`.
    pub condition: f64,
}

impl DiagonalizedSystem {
    pub fn from_dense(a: &Mat, b: &Mat) -> Result<Self> {
        if !a.is_square() || b.nrows() != a.nrows() {
            return Err(Error::DimensionMismatch("A must be n x n and b n x 1"));
        }
        if b.ncols() != 1 {
            return Err(Error::DimensionMismatch(
                "diagonalized form needs a single input",
            ));
        }
        let e = gen_eig(a, true)?;
        let x = e.vectors.expect("vectors requested");
        let lu = Lu::factor(&x).map_err(|_| Error::NearDefective {
            condition: f64::INFINITY,
        })?;
        let condition = x.norm_1() * lu.inverse().norm_1();
        if !(condition <= MAX_EIGVEC_CONDITION) {
            return Err(Error::NearDefective { condition });
        }
        let w = lu.solve(&b.to_complex())?;
        let w: Vec<C64> = w.col(0).to_vec();
        let wmax = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if wmax == 0.0 || w.iter().any(|z| z.norm() <= 1e-12 * wmax) {
            return Err(Error::Uncontrollable);
        }
        let mut xb = x.clone();
        for (j, wj) in w.iter().enumerate() {
            xb.col_mut(j).iter_mut().for_each(|v| *v *= *wj);
        }
        Ok(DiagonalizedSystem {
            lambda: e.values,
            x,
            w,
            xb,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// Cauchy matrix `-1 / (lambda_i + conj(lambda_j))`.
    pub fn cauchy(&self) -> CMat {
        let l = &self.lambda;
        CMat::from_fn(l.len(), l.len(), |i, j| {
            -C64::new(1.0, 0.0) / (l[i] + l[j].conj())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_rotation() {
        let d =
            DiagonalizedSystem::from_dense(&Mat::from_rows(&[&[-1.0]]), &Mat::from_rows(&[&[1.0]]))
                .unwrap();
        assert_eq!(d.cauchy()[(0, 0)], C64::new(0.5, 0.0));
        let a = Mat::from_rows(&[&[-0.1, 1.0], &[-1.0, -0.1]]);
        let d = DiagonalizedSystem::from_dense(&a, &Mat::col_vector(&[1.0, 0.0])).unwrap();
        // X diag(lambda) X^{-1} b = A b
        let ax = CMat::from_fn(2, 2, |i, j| d.xb[(i, j)] * d.lambda[j]);
        let s: Vec<C64> = (0..2).map(|i| ax[(i, 0)] + ax[(i, 1)]).collect();
        assert!((s[0] - C64::new(-0.1, 0.0)).norm() < 1e-14);
        assert!((s[1] - C64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_uncontrollable_and_defective() {
        let a = Mat::diag(&[-1.0, -2.0]);
        assert_eq!(
            DiagonalizedSystem::from_dense(&a, &Mat::col_vector(&[1.0, 0.0])).unwrap_err(),
            Error::Uncontrollable
        );
        let j = Mat::from_rows(&[&[-1.0, 1.0], &[0.0, -1.0]]);
        assert!(matches!(
            DiagonalizedSystem::from_dense(&j, &Mat::col_vector(&[1.0, 1.0])).unwrap_err(),
            Error::NearDefective { .. }
        ));
    }
}
