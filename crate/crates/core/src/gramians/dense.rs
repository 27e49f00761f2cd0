use crate::error::{Error, Result};
use crate::linalg::{expm, lyap_dense, spectral_abscissa_dense, sym_eig, CMat, Mat};
use crate::model::{DiagonalizedSystem, LtiSystem};
use crate::C64;

use super::TimeWindow;

/// Reachability Gramian `P_inf` (use `sys.dual()` for the observability Gramian).
pub fn gramian_infinite_dense(sys: &LtiSystem) -> Result<Mat> {
    let f = sys.dense_standard_form()?;
    let p = lyap_dense(&f.k, &f.bk.matmul_tr(&f.bk))?;
    Ok(f.lift_gramian(&p))
}

/// Time-limited reachability Gramian. Stable systems use
/// `e^{A t_s} P_inf e^{A^T t_s} - e^{A t_e} P_inf e^{A^T t_e}`; otherwise the
/// Lyapunov form is solved directly.
pub fn gramian_timelimited_dense(sys: &LtiSystem, w: TimeWindow) -> Result<Mat> {
    let f = sys.dense_standard_form()?;
    if f.k.nrows() == 0 || spectral_abscissa_dense(&f.k)? >= 0.0 {
        return gramian_timelimited_lyapunov(sys, w);
    }
    let p = lyap_dense(&f.k, &f.bk.matmul_tr(&f.bk))?;
    let ee = expm(&f.k.scaled(w.t_e))?;
    let mut pt = ee.matmul(&p).matmul_tr(&ee).scaled(-1.0);
    if w.t_s > 0.0 {
        let es = expm(&f.k.scaled(w.t_s))?;
        pt = pt.add(&es.matmul(&p).matmul_tr(&es));
    } else {
        pt = pt.add(&p);
    }
    Ok(f.lift_gramian(&pt.symmetrized()))
}

/// Time-limited Gramian from `A P + P A^T = -B_ts B_ts^T + B_te B_te^T`.
pub fn gramian_timelimited_lyapunov(sys: &LtiSystem, w: TimeWindow) -> Result<Mat> {
    let f = sys.dense_standard_form()?;
    let rhs = timelimited_rhs(&f.k, &f.bk, w)?;
    let p = lyap_dense(&f.k, &rhs)?;
    Ok(f.lift_gramian(&p))
}

/// Modified time-limited Gramian: the right-hand side is replaced by its
/// eigenvalue-wise absolute value (in working coordinates).
pub fn gramian_modified_dense(sys: &LtiSystem, w: TimeWindow) -> Result<Mat> {
    let f = sys.dense_standard_form()?;
    let rhs = timelimited_rhs(&f.k, &f.bk, w)?;
    let e = sym_eig(&rhs)?;
    let abs = Mat::from_fn(rhs.nrows(), rhs.ncols(), |i, j| {
        (0..e.values.len())
            .map(|k| e.vectors[(i, k)] * e.values[k].abs() * e.vectors[(j, k)])
            .sum()
    });
    let p = lyap_dense(&f.k, &abs.symmetrized())?;
    Ok(f.lift_gramian(&p))
}

fn timelimited_rhs(k: &Mat, b: &Mat, w: TimeWindow) -> Result<Mat> {
    let bs = if w.t_s > 0.0 {
        expm(&k.scaled(w.t_s))?.matmul(b)
    } else {
        b.clone()
    };
    let be = expm(&k.scaled(w.t_e))?.matmul(b);
    Ok(bs.matmul_tr(&bs).sub(&be.matmul_tr(&be)).symmetrized())
}

/// `P_T` on `[0, t_e]` from the eigen-representation
/// `X_B (Cc - e^{L t_e} Cc e^{L^H t_e}) X_B^H`, `Cc_ij = -1 / (l_i + conj(l_j))`.
pub fn gramian_timelimited_cauchy(d: &DiagonalizedSystem, t_e: f64) -> Result<Mat> {
    if !(t_e >= 0.0) {
        return Err(Error::InvalidWindow);
    }
    let n = d.dim();
    let c = d.cauchy();
    let e: alloc::vec::Vec<C64> = d.lambda.iter().map(|l| (l * t_e).exp()).collect();
    let inner = CMat::from_fn(n, n, |i, j| {
        c[(i, j)] * (C64::new(1.0, 0.0) - e[i] * e[j].conj())
    });
    let p = d.xb.matmul(&inner).matmul(&d.xb.adjoint());
    let re = p.real_part();
    let scale = re.max_abs();
    if p.imag_part().max_abs() > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NearDefective {
            condition: d.condition,
        });
    }
    Ok(re.symmetrized())
}

/// `Z` with `Z Z^T = P` for a symmetric positive semidefinite `P`, dropping
/// eigenvalues at or below `rel_tol * lambda_1`.
pub fn psd_factor(p: &Mat, rel_tol: f64) -> Result<Mat> {
    let e = sym_eig(p)?;
    let top = e.values.first().copied().unwrap_or(0.0);
    let keep = e
        .values
        .iter()
        .take_while(|&&v| v > rel_tol * top && v > 0.0)
        .count();
    let mut z = e.vectors.columns(0, keep);
    for j in 0..keep {
        let s = libm::sqrt(e.values[j]);
        z.col_mut(j).iter_mut().for_each(|v| *v *= s);
    }
    Ok(z)
}
