use super::lu::Lu;
use super::Mat;
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
pub fn expm(a: &Mat) -> Result<Mat> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("expm of a non-square matrix"));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let norm = a.norm_1();
    if norm == 0.0 {
        return Ok(Mat::identity(n));
    }
    let id = Mat::identity(n);
    let a2 = a.matmul(a);

    for &(m, theta) in &THETA {
        if norm <= theta {
            let (u, v) = match m {
                3 => odd_even(a, &a2, &id, &B3),
                5 => odd_even(a, &a2, &id, &B5),
                7 => odd_even(a, &a2, &id, &B7),
                _ => odd_even(a, &a2, &id, &B9),
            };
            return finish(&u, &v);
        }
    }

    let s = if norm > THETA_13 {
        libm::ceil(libm::log2(norm / THETA_13)) as i32
    } else {
        0
    };
    let scale = libm::exp2(-(s as f64));
    let a1 = a.scaled(scale);
    let a2 = a2.scaled(scale * scale);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &B13;
    let mut inner = a6.scaled(b[13]);
    inner.axpy(b[11], &a4);
    inner.axpy(b[9], &a2);
    let mut u = a6.matmul(&inner);
    u.axpy(b[7], &a6);
    u.axpy(b[5], &a4);
    u.axpy(b[3], &a2);
    u.axpy(b[1], &id);
    let u = a1.matmul(&u);
    let mut inner = a6.scaled(b[12]);
    inner.axpy(b[10], &a4);
    inner.axpy(b[8], &a2);
    let mut v = a6.matmul(&inner);
    v.axpy(b[6], &a6);
    v.axpy(b[4], &a4);
    v.axpy(b[2], &a2);
    v.axpy(b[0], &id);

    let mut r = finish(&u, &v)?;
    for _ in 0..s {
        r = r.matmul(&r);
        if !r.is_finite() {
            return Err(Error::Overflow);
        }
    }
    Ok(r)
}

fn odd_even(a: &Mat, a2: &Mat, id: &Mat, b: &[f64]) -> (Mat, Mat) {
    // U = A * sum b[2k+1] A^{2k}, V = sum b[2k] A^{2k}
    let mut pow = id.clone();
    let mut u = Mat::zeros(a.nrows(), a.ncols());
    let mut v = Mat::zeros(a.nrows(), a.ncols());
    let mut k = 0;
    while 2 * k < b.len() {
        v.axpy(b[2 * k], &pow);
        if 2 * k + 1 < b.len() {
            u.axpy(b[2 * k + 1], &pow);
        }
        k += 1;
        if 2 * k < b.len() {
            pow = pow.matmul(a2);
        }
    }
    (a.matmul(&u), v)
}

fn finish(u: &Mat, v: &Mat) -> Result<Mat> {
    // (V - U) R = (V + U)
    let p = v.add(u);
    let q = v.sub(u);
    let r = Lu::factor(&q).map_err(|_| Error::Overflow)?.solve(&p)?;
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rng};

    #[test]
    fn zero_is_identity() {
        assert_eq!(expm(&Mat::zeros(3, 3)).unwrap(), Mat::identity(3));
    }

    #[test]
    fn nilpotent() {
        let a = Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = expm(&a).unwrap();
        assert!(
            e.sub(&Mat::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]))
                .max_abs()
                < 1e-15
        );
    }

    #[test]
    fn diagonal() {
        let e = expm(&Mat::diag(&[-1.0, -2.0])).unwrap();
        assert!((e[(0, 0)] - 0.36787944117144233).abs() < 1e-15);
        assert!((e[(1, 1)] - 0.1353352832366127).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
        let e = expm(&Mat::diag(&[-30.0, 12.0])).unwrap();
        assert!((e[(0, 0)] / libm::exp(-30.0) - 1.0).abs() < 1e-13);
        assert!((e[(1, 1)] / libm::exp(12.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rotation() {
        let t = 2.5;
        let e = expm(&Mat::from_rows(&[&[0.0, t], &[-t, 0.0]])).unwrap();
        assert!((e[(0, 0)] - libm::cos(t)).abs() < 1e-14);
        assert!((e[(0, 1)] - libm::sin(t)).abs() < 1e-14);
    }

    #[test]
    fn overflow() {
        assert_eq!(expm(&Mat::diag(&[800.0])).unwrap_err(), Error::Overflow);
    }

    #[test]
    fn group_property() {
        let mut g = rng(17);
        for _ in 0..10 {
            let a = rand_mat(&mut g, 6, 6);
            let a = a.scaled(5.0 / a.norm2());
            let p = expm(&a).unwrap().matmul(&expm(&a.scaled(-1.0)).unwrap());
            assert!(p.sub(&Mat::identity(6)).norm2() <= 1e-10);
        }
    }

    #[test]
    fn semigroup_property() {
        let mut g = rng(18);
        let a = rand_mat(&mut g, 7, 7);
        let (t1, t2) = (0.7, 1.9);
        let full = expm(&a.scaled(t1 + t2)).unwrap();
        let prod = expm(&a.scaled(t1))
            .unwrap()
            .matmul(&expm(&a.scaled(t2)).unwrap());
        assert!(full.sub(&prod).norm2() <= 1e-9 * full.norm2());
    }
}
