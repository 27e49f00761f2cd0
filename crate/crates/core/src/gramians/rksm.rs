use alloc::vec::Vec;

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::linalg::{
    eigvals, expm, lyap_dense, orthonormal_extend, qr_thin, sym_eig, sym_eigvals, Mat,
};
use crate::model::{spectral_abscissa, KrylovOperator, LtiSystem};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::shifts::{adaptive_shift, fallback_shift};
use super::{GramianKind, LowRankGramian, SolverConfig, TimeWindow, TraceRow};

/// Orders up to this size get a dense stability check before the Krylov solve.
const STABILITY_CHECK_MAX: usize = 500;

/// Power and inverse iterations behind the spectral bound estimates.
const BOUND_ITERS: usize = 12;

/// Block rational Arnoldi state: orthonormal `Q`, `K Q`, `H = Q^T K Q`, `Q^T B`,
/// the finite poles used so far (conjugates included) and the Ritz values of `H`.
pub struct KrylovWorkspace<'a> {
    op: KrylovOperator<'a>,
    q: Mat,
    kq: Mat,
    h: Mat,
    bproj: Mat,
    b_norm: f64,
    last: Mat,
    shifts: Vec<C64>,
    ritz: Vec<C64>,
    bounds: Vec<C64>,
    steps: usize,
}

impl<'a> KrylovWorkspace<'a> {
    /// Start from `range(B)` (the pole at infinity).
    pub fn new(sys: &'a LtiSystem) -> Result<Self> {
        let op = KrylovOperator::new(sys)?;
        let n = op.dim();
        let b = op.b().clone();
        let q = orthonormal_extend(&Mat::zeros(n, 0), &b);
        let kq = op.apply(&q)?;
        let h = q.tr_matmul(&kq);
        let bproj = q.tr_matmul(&b);
        let ritz = eigvals(&h)?;
        let bounds = spectral_bounds(&op);
        Ok(KrylovWorkspace {
            b_norm: b.norm_fro(),
            last: q.clone(),
            op,
            q,
            kq,
            h,
            bproj,
            shifts: Vec::new(),
            ritz,
            bounds,
            steps: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn order(&self) -> usize {
        self.op.dim()
    }

    pub fn basis(&self) -> &Mat {
        &self.q
    }

    pub fn projection(&self) -> &Mat {
        &self.h
    }

    /// `Q^T B` (working coordinates).
    pub fn b_proj(&self) -> &Mat {
        &self.bproj
    }

    pub fn shifts(&self) -> &[C64] {
        &self.shifts
    }

    pub fn ritz(&self) -> &[C64] {
        &self.ritz
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn operator(&self) -> &KrylovOperator<'a> {
        &self.op
    }

    /// Pick the next pole adaptively.
    pub fn next_shift(&self) -> C64 {
        let m = self.bproj.ncols();
        let mut poles = self.shifts.clone();
        poles.extend(self.bounds.iter().map(|b| -b.conj()));
        adaptive_shift(&self.ritz, &poles, &self.bounds, m, self.op.is_symmetric())
            .unwrap_or_else(|_| fallback_shift(&self.ritz, &self.shifts))
    }

    /// One rational Arnoldi step with an adaptive pole. Complex poles add the real
    /// and imaginary parts of the solve (the conjugate pole is implied).
    pub fn step(&mut self) -> Result<C64> {
        let s = self.next_shift();
        self.step_with(s)
    }

    pub fn step_with(&mut self, s: C64) -> Result<C64> {
        let (s, g) = match self.solve(s) {
            Err(Error::SingularShift) => {
                let p = s * (1.0 + 1e-6) + C64::new(1e-8 * s.norm().max(1.0), 0.0);
                self.solve(p)?
            }
            other => other?,
        };
        let d = self.dim();
        let ext = orthonormal_extend(&self.q, &g);
        let added = ext.ncols() - d;
        self.steps += 1;
        if added == 0 {
            return Err(Error::Stagnation { dim: d });
        }
        let new = ext.columns(d, ext.ncols());
        let knew = self.op.apply(&new)?;
        let mut h = Mat::zeros(d + added, d + added);
        h.set_submatrix(0, 0, &self.h);
        h.set_submatrix(0, d, &self.q.tr_matmul(&knew));
        h.set_submatrix(d, 0, &new.tr_matmul(&self.kq));
        h.set_submatrix(d, d, &new.tr_matmul(&knew));
        let m = self.bproj.ncols().max(1);
        self.last = new.columns(added.saturating_sub(m), added);
        self.q = ext;
        self.kq.push_columns(&knew);
        self.h = h;
        self.bproj = self.bproj.resized_rows(d + added);
        self.shifts.push(s);
        if s.im != 0.0 {
            self.shifts.push(s.conj());
        }
        self.ritz = eigvals(&self.h)?;
        Ok(s)
    }

    fn solve(&self, s: C64) -> Result<(C64, Mat)> {
        if s.im == 0.0 {
            Ok((s, self.op.solve_real(s.re, &self.last)?))
        } else {
            let g = self.op.solve_complex(s, &self.last)?;
            Ok((s, g.real_part().hcat(&g.imag_part())))
        }
    }

    /// `(e^{H t} Q^T B, Q e^{H t} Q^T B)`.
    pub fn expm_action(&self, t: f64) -> Result<(Mat, Mat)> {
        let c = if t == 0.0 {
            self.bproj.clone()
        } else {
            expm(&self.h.scaled(t))?.matmul(&self.bproj)
        };
        let lifted = self.q.matmul(&c);
        Ok((c, lifted))
    }

    /// Spectral norm of `K (Q Y Q^T) + (Q Y Q^T) K^T + Q F Q^T`, evaluated from
    /// `K Q - Q H = U R` without forming any `n x n` matrix.
    pub fn residual_norm(&self, y: &Mat, f: &Mat) -> Result<f64> {
        let d = self.dim();
        if y.shape() != (d, d) || f.shape() != (d, d) {
            return Err(Error::DimensionMismatch("residual: projected sizes"));
        }
        let w = self.kq.sub(&self.q.matmul(&self.h));
        let (_, r) = qr_thin(&w);
        let rmax = r.max_abs();
        let row_max = |i: usize| (0..d).map(|j| r[(i, j)].abs()).fold(0.0, f64::max);
        let rows: Vec<usize> = (0..r.nrows())
            .filter(|&i| row_max(i) > 1e-15 * rmax)
            .collect();
        let r = Mat::from_fn(rows.len(), d, |i, j| r[(rows[i], j)]);
        let ry = r.matmul(y);
        let hy = self.h.matmul(y);
        let e = hy.add(&hy.transpose()).add(f);
        let k = rows.len();
        let mut blk = Mat::zeros(d + k, d + k);
        blk.set_submatrix(0, 0, &e);
        blk.set_submatrix(d, 0, &ry);
        blk.set_submatrix(0, d, &ry.transpose());
        let ev = sym_eigvals(&blk)?;
        Ok(ev.iter().fold(0.0, |m, v| m.max(v.abs())))
    }
}

/// Rough `-|lambda|_min` and `-|lambda|_max` of `K` by inverse and power iteration
/// from a fixed start vector. Empty if a solve fails.
fn spectral_bounds(op: &KrylovOperator<'_>) -> Vec<C64> {
    let n = op.dim();
    if n == 0 {
        return Vec::new();
    }
    let mut g = ChaCha8Rng::seed_from_u64(0x5eed);
    let x0 = Mat::from_fn(n, 1, |_, _| g.gen_range(-1.0..1.0));
    let iterate = |f: &dyn Fn(&Mat) -> Result<Mat>| -> Option<f64> {
        let mut x = x0.scaled(1.0 / x0.norm_fro());
        let mut ratio = 0.0;
        for _ in 0..BOUND_ITERS {
            let y = f(&x).ok()?;
            ratio = y.norm_fro();
            if !(ratio.is_finite() && ratio > 0.0) {
                return None;
            }
            x = y.scaled(1.0 / ratio);
        }
        Some(ratio)
    };
    let hi = iterate(&|x| op.apply(x));
    let inv = iterate(&|x| op.solve_real(0.0, x));
    match (hi, inv) {
        (Some(hi), Some(inv)) => alloc::vec![C64::new(-1.0 / inv, 0.0), C64::new(-hi, 0.0)],
        _ => Vec::new(),
    }
}

/// `e^{H t} Q^T B` and its lift `Q e^{H t} Q^T B`.
pub fn expm_action_approx(ws: &KrylovWorkspace<'_>, t: f64) -> Result<(Mat, Mat)> {
    ws.expm_action(t)
}

/// Factor `B_mod` of the modified projected right-hand side: eigenvectors of
/// `B_ts B_ts^T - B_te B_te^T` (projected) scaled by `|lambda|^{1/2}`.
pub fn modified_rhs(ws: &KrylovWorkspace<'_>, w: TimeWindow) -> Result<Mat> {
    let (cte, _) = ws.expm_action(w.t_e)?;
    let (cts, _) = ws.expm_action(w.t_s)?;
    abs_factor(&cts.matmul_tr(&cts).sub(&cte.matmul_tr(&cte)))
}

/// `F_mod` factor: `F = S diag(l) S^T` gives `S diag(|l|)^{1/2}` over nonzero `l`.
pub(crate) fn abs_factor(f: &Mat) -> Result<Mat> {
    let e = sym_eig(&f.symmetrized())?;
    let top = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let keep: Vec<usize> = (0..e.values.len())
        .filter(|&i| top > 0.0 && e.values[i].abs() > 1e-14 * top)
        .collect();
    Ok(Mat::from_fn(f.nrows(), keep.len(), |i, j| {
        e.vectors[(i, keep[j])] * libm::sqrt(e.values[keep[j]].abs())
    }))
}

pub fn solve_infinite_lowrank(sys: &LtiSystem, cfg: &SolverConfig) -> Result<LowRankGramian> {
    solve_gramian(sys, GramianKind::Infinite, cfg)
}

pub fn solve_timelimited_lowrank(
    sys: &LtiSystem,
    w: TimeWindow,
    cfg: &SolverConfig,
) -> Result<LowRankGramian> {
    solve_gramian(sys, GramianKind::TimeLimited(w), cfg)
}

pub fn solve_modified_lowrank(
    sys: &LtiSystem,
    w: TimeWindow,
    cfg: &SolverConfig,
) -> Result<LowRankGramian> {
    solve_gramian(sys, GramianKind::Modified(w), cfg)
}

/// Rational Krylov low-rank solver for the reachability Gramian of `sys`
/// (pass `sys.dual()` for the observability Gramian).
pub fn solve_gramian(
    sys: &LtiSystem,
    kind: GramianKind,
    cfg: &SolverConfig,
) -> Result<LowRankGramian> {
    cfg.validate()?;
    let n = sys.order();
    if n > 0 && n <= STABILITY_CHECK_MAX {
        let r = spectral_abscissa(sys)?;
        if r >= 0.0 {
            return Err(Error::Unstable { abscissa: r });
        }
    }
    let clock = Stopwatch::start();
    let mut ws = KrylovWorkspace::new(sys)?;
    let mut trace = alloc::vec![TraceRow {
        iteration: 0,
        shift: None,
        dim: ws.dim(),
        f_change: None,
        mu: None,
    }];
    let floor = libm::sqrt(f64::EPSILON) * ws.b_norm;
    let mut prev: Option<(Mat, Mat)> = None;
    let mut iter = 0usize;
    loop {
        iter += 1;
        let mut exhausted = ws.dim() >= n;
        let mut shift = None;
        if !exhausted {
            match ws.step() {
                Ok(s) => shift = Some(s),
                Err(Error::Stagnation { .. }) => exhausted = true,
                Err(e) => return Err(e),
            }
        }
        exhausted |= ws.dim() >= n;
        let mut row = TraceRow {
            iteration: iter,
            shift,
            dim: ws.dim(),
            f_change: None,
            mu: None,
        };
        if iter % cfg.cadence == 0 || exhausted {
            let (f, f_ok) = match kind {
                GramianKind::Infinite => (ws.b_proj().matmul_tr(ws.b_proj()), true),
                GramianKind::TimeLimited(w) | GramianKind::Modified(w) => {
                    let (cte, lte) = ws.expm_action(w.t_e)?;
                    let (cts, lts) = ws.expm_action(w.t_s)?;
                    let change = prev.as_ref().map(|(pe, ps)| {
                        let ce = lte.sub(pe).norm_fro() / lte.norm_fro().max(floor);
                        if w.t_s > 0.0 {
                            ce.max(lts.sub(ps).norm_fro() / lts.norm_fro().max(floor))
                        } else {
                            ce
                        }
                    });
                    row.f_change = change;
                    prev = Some((lte, lts));
                    let ok = exhausted || change.map_or(false, |c| c < cfg.tol_f);
                    let mut f = cts.matmul_tr(&cts).sub(&cte.matmul_tr(&cte)).symmetrized();
                    if let GramianKind::Modified(_) = kind {
                        let bm = abs_factor(&f)?;
                        f = bm.matmul_tr(&bm);
                    }
                    (f, ok)
                }
            };
            if f_ok {
                let fnorm = f.norm2_sym();
                if fnorm == 0.0 {
                    row.mu = Some(0.0);
                    trace.push(row);
                    return Ok(LowRankGramian {
                        z: Mat::zeros(n, 0),
                        mu: 0.0,
                        dim: ws.dim(),
                        rank: 0,
                        wall_time: clock.elapsed(),
                        trace,
                    });
                }
                match lyap_dense(ws.projection(), &f) {
                    Ok(y) => {
                        let mu = ws.residual_norm(&y, &f)? / fnorm;
                        row.mu = Some(mu);
                        if mu < cfg.tol_p {
                            // tighten the cut until the truncated factor also meets tol_p
                            let mut tol = cfg.trunc_tol;
                            let (s, gamma, mu_t) = loop {
                                let (s, gamma) = truncate(&y, tol)?;
                                let yt = s.matmul(&Mat::diag(&gamma)).matmul_tr(&s);
                                let mu_t = ws.residual_norm(&yt, &f)? / fnorm;
                                if mu_t < cfg.tol_p || tol < 1e-30 {
                                    break (s, gamma, mu_t);
                                }
                                tol *= 1e-3;
                            };
                            if mu_t < cfg.tol_p || exhausted {
                                row.mu = Some(mu_t);
                                trace.push(row);
                                let mut zc = s;
                                for (j, g) in gamma.iter().enumerate() {
                                    let r = libm::sqrt(*g);
                                    zc.col_mut(j).iter_mut().for_each(|v| *v *= r);
                                }
                                let z = ws.operator().lift(&ws.basis().matmul(&zc));
                                return Ok(LowRankGramian {
                                    rank: z.ncols(),
                                    z,
                                    mu: mu_t,
                                    dim: ws.dim(),
                                    wall_time: clock.elapsed(),
                                    trace,
                                });
                            }
                        }
                    }
                    Err(Error::SpectrumConflict) if !exhausted => {}
                    Err(e) => return Err(e),
                }
            }
        }
        trace.push(row);
        if exhausted {
            return Err(Error::Stagnation { dim: ws.dim() });
        }
        if ws.dim() > cfg.max_dim {
            return Err(Error::MaxDimExceeded { dim: ws.dim() });
        }
    }
}

/// Eigenpairs of `Y` above `tol * gamma_1` (positive only).
fn truncate(y: &Mat, tol: f64) -> Result<(Mat, Vec<f64>)> {
    let e = sym_eig(y)?;
    let top = e.values.first().copied().unwrap_or(0.0);
    let keep = e
        .values
        .iter()
        .take_while(|&&v| v > 0.0 && v > tol * top)
        .count();
    Ok((e.vectors.columns(0, keep), e.values[..keep].to_vec()))
}
