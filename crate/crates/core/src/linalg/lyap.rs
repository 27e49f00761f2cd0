use num_complex::Complex64;

use super::eig::schur_complex;
use super::{CMat, Mat};
use crate::error::{Error, Result};

/// Solve `A X + X A^T = -W` for symmetric `W` (Bartels–Stewart on the complex Schur form).
pub fn lyap_dense(a: &Mat, w: &Mat) -> Result<Mat> {
    if !a.is_square() || !w.is_square() || a.nrows() != w.nrows() {
        return Err(Error::DimensionMismatch("lyap_dense operands"));
    }
    if !w.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let (q, t) = schur_complex(a)?;
    let c = q
        .adjoint()
        .matmul(&w.to_complex())
        .matmul(&q)
        .scaled(Complex64::new(-1.0, 0.0));
    let y = triangular_lyap(&t, &c, a.norm_fro())?;
    let x = q.matmul(&y).matmul(&q.adjoint()).real_part();
    Ok(x.symmetrized())
}

/// Solve `T Y + Y T^H = C` with `T` upper triangular.
fn triangular_lyap(t: &CMat, c: &CMat, anorm: f64) -> Result<CMat> {
    let n = t.nrows();
    let tiny = (1e2 * f64::EPSILON * anorm).max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    let mut rhs = vec_c(n);
    for j in (0..n).rev() {
        rhs.copy_from_slice(c.col(j));
        for k in j + 1..n {
            let f = t[(j, k)].conj();
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            let yk = y.col(k);
            for (r, &v) in rhs.iter_mut().zip(yk) {
                *r -= f * v;
            }
        }
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut s = rhs[i];
            let ycol = y.col(j);
            for l in i + 1..n {
                s -= t[(i, l)] * ycol[l];
            }
            let d = t[(i, i)] + shift;
            if d.norm() <= tiny {
                return Err(Error::SpectrumConflict);
            }
            y[(i, j)] = s / d;
        }
    }
    Ok(y)
}

fn vec_c(n: usize) -> alloc::vec::Vec<Complex64> {
    alloc::vec![Complex64::new(0.0, 0.0); n]
}

/// `||A X + X A^T + W||_F`.
pub fn lyap_residual(a: &Mat, x: &Mat, w: &Mat) -> f64 {
    let ax = a.matmul(x);
    ax.add(&ax.transpose()).add(w).norm_fro()
}
