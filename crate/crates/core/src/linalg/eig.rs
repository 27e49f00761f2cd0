use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{CMat, Mat};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigenvalues and (optionally) eigenvectors of a general real matrix.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors as columns, present when requested.
    pub vectors: Option<CMat>,
}

/// Eigen-decomposition of a real square matrix; eigenvectors via the complex Schur form.
pub fn gen_eig(a: &Mat, vectors: bool) -> Result<EigDecomposition> {
    check_square(a)?;
    if !vectors {
        return Ok(EigDecomposition {
            values: eigvals(a)?,
            vectors: None,
        });
    }
    let (q, t) = schur_complex(a)?;
    let n = a.nrows();
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let x = triangular_eigvecs(&t);
    let mut v = q.matmul(&x);
    for j in 0..n {
        let nrm = libm::sqrt(v.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>());
        if nrm > 0.0 {
            v.col_mut(j).iter_mut().for_each(|z| *z /= nrm);
        }
    }
    Ok(EigDecomposition {
        values,
        vectors: Some(v),
    })
}

/// Eigenvalues of a real square matrix (Hessenberg + Francis double-shift QR).
/// Complex eigenvalues come in exact conjugate pairs.
pub fn eigvals(a: &Mat) -> Result<Vec<Complex64>> {
    check_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg(&mut h, None);
    let (re, im) = hqr(&mut h)?;
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect())
}

/// Complex Schur decomposition `A = Q T Q^H` of a real matrix.
pub fn schur_complex(a: &Mat) -> Result<(CMat, CMat)> {
    check_square(a)?;
    let n = a.nrows();
    let mut h = a.clone();
    let mut v = Mat::identity(n);
    hessenberg(&mut h, Some(&mut v));
    let mut t = h.to_complex();
    let mut q = v.to_complex();
    complex_qr(&mut t, &mut q)?;
    Ok((q, t))
}

fn check_square(a: &Mat) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "eigenproblem of a non-square matrix",
        ));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Orthogonal reduction to upper Hessenberg form, optionally accumulating the transform.
fn hessenberg(h: &mut Mat, v: Option<&mut Mat>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[(i, m - 1)].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = libm::sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }
    if let Some(v) = v {
        for m in (1..high).rev() {
            if h[(m, m - 1)] == 0.0 {
                continue;
            }
            for i in m + 1..=high {
                ort[i] = h[(i, m - 1)];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[(i, j)];
                }
                g = (g / ort[m]) / h[(m, m - 1)];
                for i in m..=high {
                    v[(i, j)] += g * ort[i];
                }
            }
        }
    }
    for j in 0..n {
        for i in j + 2..n {
            h[(i, j)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
fn hqr(h: &mut Mat) -> Result<(Vec<f64>, Vec<f64>)> {
    let nn = h.nrows();
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let (mut x, mut y, mut w);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0;
    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            d[nu] = h[(nu, nu)] + exshift;
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = libm::sqrt(q.abs());
            x = h[(nu, nu)] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = h[(nu - 1, nu - 1)];
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = libm::sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::NoConvergence("Hessenberg QR iteration"));
            }

            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = libm::sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in l..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }
    if d.iter().chain(&e).any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence("Hessenberg QR iteration"));
    }
    Ok((d, e))
}

/// Unitary rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn new(a: Complex64, b: Complex64) -> Self {
        let na = a.norm();
        let nb = b.norm();
        if nb == 0.0 {
            return Givens {
                c: 1.0,
                s: Complex64::new(0.0, 0.0),
            };
        }
        if na == 0.0 {
            return Givens {
                c: 0.0,
                s: Complex64::new(1.0, 0.0),
            };
        }
        let r = libm::hypot(na, nb);
        Givens {
            c: na / r,
            s: (a / na) * b.conj() / r,
        }
    }

    /// Rows `i, i+1` of `t`, columns `c0..`, left-multiplied by `G`.
    fn rows(&self, t: &mut CMat, i: usize, c0: usize) {
        for j in c0..t.ncols() {
            let x = t[(i, j)];
            let y = t[(i + 1, j)];
            t[(i, j)] = x.scale(self.c) + self.s * y;
            t[(i + 1, j)] = -self.s.conj() * x + y.scale(self.c);
        }
    }

    /// Columns `i, i+1` of `t`, rows `..r1`, right-multiplied by `G^H`.
    fn cols(&self, t: &mut CMat, i: usize, r1: usize) {
        for k in 0..r1 {
            let x = t[(k, i)];
            let y = t[(k, i + 1)];
            t[(k, i)] = x.scale(self.c) + self.s.conj() * y;
            t[(k, i + 1)] = -self.s * x + y.scale(self.c);
        }
    }
}

/// Single-shift complex QR on a Hessenberg matrix, reducing it to triangular `T`
/// and accumulating the unitary factor into `q`.
fn complex_qr(t: &mut CMat, q: &mut CMat) -> Result<()> {
    let n = t.nrows();
    if n < 2 {
        return Ok(());
    }
    let max_iter = 30 * n;
    let mut iu = n - 1;
    let mut iter = 0;
    let mut total = 0;
    let negligible = |t: &mut CMat, i: usize| -> bool {
        let sd = t[(i + 1, i)].l1_norm();
        let dd = t[(i, i)].l1_norm() + t[(i + 1, i + 1)].l1_norm();
        if sd <= f64::EPSILON * dd || sd < f64::MIN_POSITIVE {
            t[(i + 1, i)] = Complex64::new(0.0, 0.0);
            true
        } else {
            false
        }
    };
    loop {
        while iu > 0 {
            if negligible(t, iu - 1) {
                iter = 0;
                iu -= 1;
            } else {
                break;
            }
        }
        if iu == 0 {
            break;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence("complex Schur QR iteration"));
        }
        let mut il = iu - 1;
        while il > 0 && !negligible(t, il - 1) {
            il -= 1;
        }

        let shift = wilkinson_shift(t, iu, iter);
        let mut g = Givens::new(t[(il, il)] - shift, t[(il + 1, il)]);
        g.rows(t, il, il);
        g.cols(t, il, (il + 2).min(iu) + 1);
        g.cols(q, il, n);
        for i in il + 1..iu {
            g = Givens::new(t[(i, i - 1)], t[(i + 1, i - 1)]);
            g.rows(t, i, i - 1);
            t[(i + 1, i - 1)] = Complex64::new(0.0, 0.0);
            g.cols(t, i, (i + 2).min(iu) + 1);
            g.cols(q, i, n);
        }
    }
    Ok(())
}

fn wilkinson_shift(t: &CMat, iu: usize, iter: usize) -> Complex64 {
    if (iter == 10 || iter == 20) && iu >= 2 {
        // exceptional shift
        return Complex64::new(t[(iu, iu - 1)].re.abs() + t[(iu - 1, iu - 2)].re.abs(), 0.0);
    }
    let a = t[(iu - 1, iu - 1)];
    let b = t[(iu - 1, iu)];
    let c = t[(iu, iu - 1)];
    let d = t[(iu, iu)];
    let normt = libm::sqrt(a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr());
    if normt == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (a, b, c, d) = (a / normt, b / normt, c / normt, d / normt);
    let bc = b * c;
    let diff = a - d;
    let disc = (diff * diff + bc * 4.0).sqrt();
    let det = a * d - bc;
    let tr = a + d;
    let mut e1 = (tr + disc) / 2.0;
    let mut e2 = (tr - disc) / 2.0;
    if e1.l1_norm() > e2.l1_norm() {
        e2 = det / e1;
    } else if e2 != Complex64::new(0.0, 0.0) {
        e1 = det / e2;
    }
    if (e1 - d).l1_norm() < (e2 - d).l1_norm() {
        e1 * normt
    } else {
        e2 * normt
    }
}

/// Eigenvectors of an upper triangular matrix by back substitution (columns, unnormalized).
fn triangular_eigvecs(t: &CMat) -> CMat {
    let n = t.nrows();
    let smin = (f64::EPSILON * t.norm_fro()).max(f64::MIN_POSITIVE);
    let mut x = CMat::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        x[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut den = t[(i, i)] - lam;
            if den.norm() < smin {
                den = Complex64::new(smin, 0.0);
            }
            x[(i, k)] = -s / den;
        }
        // rescale to keep growth in check
        let m = (0..=k).fold(0.0f64, |m, i| m.max(x[(i, k)].norm()));
        if m > 1e100 {
            for i in 0..=k {
                x[(i, k)] = x[(i, k)].scale(1.0 / m);
            }
        }
    }
    x
}

/// Maximum real part of the spectrum.
pub fn spectral_abscissa_dense(a: &Mat) -> Result<f64> {
    Ok(eigvals(a)?
        .iter()
        .fold(f64::NEG_INFINITY, |m, z| m.max(z.re)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rng};

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        // every value has a partner within tol
        a.len() == b.len()
            && a.iter().all(|x| b.iter().any(|y| (x - y).norm() < tol))
            && b.iter().all(|y| a.iter().any(|x| (x - y).norm() < tol))
    }

    #[test]
    fn rotation_generator() {
        let a = Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let v = sorted(eigvals(&a).unwrap());
        assert!(close(
            &v,
            &[Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)],
            1e-14
        ));
        let d = gen_eig(&a, true).unwrap();
        assert!(close(&sorted(d.values), &v, 1e-14));
    }

    #[test]
    fn triangular() {
        let a = Mat::from_rows(&[&[-1.0, 5.0], &[0.0, -2.0]]);
        let v = sorted(eigvals(&a).unwrap());
        assert!(close(
            &v,
            &[Complex64::new(-2.0, 0.0), Complex64::new(-1.0, 0.0)],
            1e-14
        ));
    }

    #[test]
    fn companion() {
        let a = Mat::from_rows(&[&[0.0, 1.0], &[-2.0, -3.0]]);
        let v = sorted(eigvals(&a).unwrap());
        assert!(close(
            &v,
            &[Complex64::new(-2.0, 0.0), Complex64::new(-1.0, 0.0)],
            1e-14
        ));
        assert!((spectral_abscissa_dense(&a).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_residual_and_agreement() {
        let mut g = rng(11);
        for n in [1, 3, 8, 25, 60] {
            let a = rand_mat(&mut g, n, n);
            let d = gen_eig(&a, true).unwrap();
            let x = d.vectors.unwrap();
            let ac = a.to_complex();
            let res = ac
                .matmul(&x)
                .sub(&x.matmul(&CMat::diag(&d.values)))
                .norm_fro();
            assert!(res <= 1e-11 * a.norm_fro() * n as f64, "n={n} res={res}");
            let v1 = sorted(eigvals(&a).unwrap());
            let v2 = sorted(d.values);
            assert!(close(&v1, &v2, 1e-9), "n={n}");
        }
    }

    #[test]
    fn schur_reconstructs() {
        let mut g = rng(12);
        let a = rand_mat(&mut g, 30, 30);
        let (q, t) = schur_complex(&a).unwrap();
        let back = q.matmul(&t).matmul(&q.adjoint());
        assert!(back.sub(&a.to_complex()).max_abs() < 1e-12);
        for j in 0..30 {
            for i in j + 1..30 {
                assert_eq!(t[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }
}
