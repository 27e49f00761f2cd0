use alloc::vec::Vec;

use super::qr::{dot, norm, orthonormal_extend};
use super::Mat;
use crate::error::{Error, Result};

/// Thin SVD `A = U diag(s) V^T`, `s` non-increasing, `k = min(m, n)` columns in `U` and `V`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

const MAX_SWEEPS: usize = 80;

pub fn svd(a: &Mat) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (m, n) = a.shape();
    if m < n {
        let t = jacobi(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    jacobi(a)
}

pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

// one-sided Jacobi on the columns, m >= n
fn jacobi(a: &Mat) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = Mat::identity(n);
    let tol = f64::EPSILON;
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let cp = w.col(p);
                    let cq = w.col(q);
                    (dot(cp, cp), dot(cq, cq), dot(cp, cq))
                };
                if gamma == 0.0 || gamma.abs() <= tol * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence("Jacobi SVD"));
    }
    let mut s: Vec<f64> = (0..n).map(|j| norm(w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    s = order.iter().map(|&i| s[i]).collect();
    let v = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);

    let smax = s.first().copied().unwrap_or(0.0);
    let cut = smax * f64::EPSILON * m.max(n) as f64;
    let mut u = Mat::zeros(m, 0);
    let mut pending = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        if s[k] > cut && s[k] > 0.0 {
            let col: Vec<f64> = w.col(j).iter().map(|x| x / s[k]).collect();
            u.push_columns(&Mat::col_vector(&col));
        } else {
            pending.push(k);
        }
    }
    if !pending.is_empty() {
        // complete U with an orthonormal basis for the remaining directions
        let kept = u.ncols();
        let mut full = u.clone();
        let mut e = 0;
        while full.ncols() < n && e < m {
            let mut ei = Mat::zeros(m, 1);
            ei[(e, 0)] = 1.0;
            full = orthonormal_extend(&full, &ei);
            e += 1;
        }
        // place completions at the positions of the tiny singular values
        let mut out = Mat::zeros(m, n);
        let mut next_kept = 0;
        let mut next_extra = kept;
        for k in 0..n {
            let src = if pending.contains(&k) {
                let c = next_extra;
                next_extra += 1;
                c
            } else {
                let c = next_kept;
                next_kept += 1;
                c
            };
            out.col_mut(k).copy_from_slice(full.col(src));
        }
        u = out;
    }
    Ok(Svd { u, s, v })
}

fn rotate(w: &mut Mat, p: usize, q: usize, c: f64, s: f64) {
    let m = w.nrows();
    let data = w.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * m);
    let cp = &mut lo[p * m..(p + 1) * m];
    let cq = &mut hi[..m];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rng};

    fn check(a: &Mat, tol: f64) {
        let r = svd(a).unwrap();
        let k = a.nrows().min(a.ncols());
        assert_eq!(r.s.len(), k);
        let back = r.u.matmul(&Mat::diag(&r.s)).matmul(&r.v.transpose());
        let s1 = r.s.first().copied().unwrap_or(0.0).max(1.0);
        assert!(back.sub(a).max_abs() <= tol * s1);
        assert!(r.u.tr_matmul(&r.u).sub(&Mat::identity(k)).max_abs() < 1e-12);
        assert!(r.v.tr_matmul(&r.v).sub(&Mat::identity(k)).max_abs() < 1e-12);
        assert!(r.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn diagonal() {
        let r = svd(&Mat::diag(&[1.0, 3.0])).unwrap();
        assert_eq!(r.s, alloc::vec![3.0, 1.0]);
    }

    #[test]
    fn zero_matrix() {
        let z = Mat::zeros(3, 2);
        let r = svd(&z).unwrap();
        assert_eq!(r.s, alloc::vec![0.0, 0.0]);
        check(&z, 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        let mut g = rng(13);
        check(&rand_mat(&mut g, 6, 4), 1e-12);
        check(&rand_mat(&mut g, 4, 6), 1e-12);
        check(&rand_mat(&mut g, 20, 20), 1e-12);
        // rank deficient
        let z = rand_mat(&mut g, 8, 2);
        check(&z.matmul_tr(&z), 1e-12);
    }
}
