use alloc::vec::Vec;

use super::Mat;

/// Default deflation threshold for [`orthonormal_extend`], relative to the incoming column norm.
pub const DEFLATION_TOL: f64 = 1e-12;

/// Thin Householder QR: `A = Q R` with `Q` m×k orthonormal, `R` k×n upper triangular,
/// `k = min(m, n)`. Works for rank-deficient input.
pub fn qr_thin(a: &Mat) -> (Mat, Mat) {
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut r = a.clone();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut betas = Vec::with_capacity(k);
    for j in 0..k {
        let x = &r.col(j)[j..];
        let alpha = norm(x);
        let mut v = x.to_vec();
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm2 = dot(&v, &v);
        let beta = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
        if beta != 0.0 {
            for c in j..n {
                let col = &mut r.col_mut(c)[j..];
                let s = beta * dot(&v, col);
                for (ci, vi) in col.iter_mut().zip(&v) {
                    *ci -= s * vi;
                }
            }
        }
        vs.push(v);
        betas.push(beta);
    }
    // accumulate Q = H_0 ... H_{k-1} [I; 0]
    let mut q = Mat::zeros(m, k);
    for i in 0..k {
        q[(i, i)] = 1.0;
    }
    for j in (0..k).rev() {
        let (v, beta) = (&vs[j], betas[j]);
        if beta == 0.0 {
            continue;
        }
        for c in 0..k {
            let col = &mut q.col_mut(c)[j..];
            let s = beta * dot(v, col);
            for (ci, vi) in col.iter_mut().zip(v) {
                *ci -= s * vi;
            }
        }
    }
    let mut rr = Mat::zeros(k, n);
    for c in 0..n {
        for i in 0..k.min(c + 1) {
            rr[(i, c)] = r[(i, c)];
        }
    }
    (q, rr)
}

/// Append to `q` (orthonormal columns) an orthonormal basis for the part of `range(v)`
/// outside `range(q)`. Columns of `v` that are numerically in the current span are dropped.
pub fn orthonormal_extend(q: &Mat, v: &Mat) -> Mat {
    orthonormal_extend_tol(q, v, DEFLATION_TOL)
}

/// [`orthonormal_extend`] with an explicit relative deflation threshold.
pub fn orthonormal_extend_tol(q: &Mat, v: &Mat, tol: f64) -> Mat {
    let n = if q.ncols() > 0 { q.nrows() } else { v.nrows() };
    assert_eq!(v.nrows(), n, "orthonormal_extend: row mismatch");
    let mut out = if q.ncols() > 0 {
        q.clone()
    } else {
        Mat::zeros(n, 0)
    };
    for j in 0..v.ncols() {
        let mut w = v.col(j).to_vec();
        let nrm0 = norm(&w);
        if nrm0 == 0.0 {
            continue;
        }
        let mut nrm = nrm0;
        let mut keep = true;
        // two passes, with a third when the second still cancels heavily
        for pass in 0..4 {
            project_out(&out, &mut w);
            let after = norm(&w);
            if after <= tol * nrm0 {
                keep = false;
                break;
            }
            if pass >= 1 && after > 0.5 * nrm {
                break;
            }
            nrm = after;
        }
        if !keep {
            continue;
        }
        let s = 1.0 / norm(&w);
        w.iter_mut().for_each(|x| *x *= s);
        out.push_columns(&Mat::col_vector(&w));
    }
    out
}

fn project_out(q: &Mat, w: &mut [f64]) {
    for c in 0..q.ncols() {
        let qc = q.col(c);
        let s = dot(qc, w);
        for (wi, qi) in w.iter_mut().zip(qc) {
            *wi -= s * qi;
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = a.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * libm::sqrt(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rng};

    fn e(n: usize, i: usize) -> Mat {
        let mut v = Mat::zeros(n, 1);
        v[(i, 0)] = 1.0;
        v
    }

    fn orth_err(q: &Mat) -> f64 {
        q.tr_matmul(q).sub(&Mat::identity(q.ncols())).max_abs()
    }

    #[test]
    fn extend_orthogonal_column() {
        let q = orthonormal_extend(&e(3, 0), &e(3, 1));
        assert_eq!(q, e(3, 0).hcat(&e(3, 1)));
    }

    #[test]
    fn extend_dependent_column_deflates() {
        let q = orthonormal_extend(&e(3, 0), &e(3, 0));
        assert_eq!(q.ncols(), 1);
    }

    #[test]
    fn extend_hand_gram_schmidt() {
        let q = orthonormal_extend(&e(3, 0), &Mat::col_vector(&[1.0, 1.0, 0.0]));
        assert_eq!(q.ncols(), 2);
        assert!((q[(1, 1)].abs() - 1.0).abs() < 1e-15);
        assert!(q[(0, 1)].abs() < 1e-15 && q[(2, 1)].abs() < 1e-15);
    }

    #[test]
    fn extend_random_blocks_stays_orthonormal() {
        let mut r = rng(3);
        let mut q = Mat::zeros(40, 0);
        for _ in 0..10 {
            let v = rand_mat(&mut r, 40, 3);
            q = orthonormal_extend(&q, &v);
        }
        assert_eq!(q.ncols(), 30);
        assert!(orth_err(&q) < 1e-12);
        // nearly dependent direction
        let v = q.columns(0, 1).add(&rand_mat(&mut r, 40, 1).scaled(1e-10));
        let q2 = orthonormal_extend(&q, &v);
        assert!(orth_err(&q2) < 1e-12);
    }

    #[test]
    fn qr_reconstructs() {
        let mut r = rng(4);
        for (m, n) in [(7, 3), (3, 7), (5, 5)] {
            let a = rand_mat(&mut r, m, n);
            let (q, rr) = qr_thin(&a);
            assert!(q.matmul(&rr).sub(&a).max_abs() < 1e-13);
            assert!(orth_err(&q) < 1e-13);
        }
        let a = Mat::zeros(4, 2);
        let (q, rr) = qr_thin(&a);
        assert_eq!(q.matmul(&rr), a);
    }
}
