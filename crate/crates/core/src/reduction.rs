//! Square-root balanced truncation (standard, time-limited, modified
//! time-limited), Hankel singular values and error-bound diagnostics.

use alloc::vec::Vec;

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::gramians::{
    gramian_infinite_dense, gramian_modified_dense, gramian_timelimited_dense, psd_factor, solve_gramian,
    GramianKind, SolverConfig, TimeWindow,
};
use crate::linalg::{eigvals, singular_values, svd, sym_eigvals, Mat};
use crate::model::{LtiSystem, Operator, StandardSystem};

/// Relative floor below which a singular value of `Z_Q^T M Z_P` counts as zero.
pub const RANK_TOL: f64 = 1e-14;

/// Balancing variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Bt,
    Tlbt,
    Mtlbt,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Bt => "bt",
            Mode::Tlbt => "tlbt",
            Mode::Mtlbt => "mtlbt",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "bt" => Some(Mode::Bt),
            "tlbt" => Some(Mode::Tlbt),
            "mtlbt" => Some(Mode::Mtlbt),
            _ => None,
        }
    }

    /// Gramian type for this mode; `window` is required unless the mode is BT.
    pub fn gramian_kind(&self, window: Option<TimeWindow>) -> Result<GramianKind> {
        match (self, window) {
            (Mode::Bt, _) => Ok(GramianKind::Infinite),
            (Mode::Tlbt, Some(w)) => Ok(GramianKind::TimeLimited(w)),
            (Mode::Mtlbt, Some(w)) => Ok(GramianKind::Modified(w)),
            _ => Err(Error::InvalidWindow),
        }
    }
}

/// How the reduced order is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrderSelection {
    Fixed(usize),
    /// Smallest `r` with `2 * sum_{j > r} sigma_j <= tol`.
    Tolerance(f64),
}

/// Where the Gramian factors come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramianMethod {
    Krylov,
    /// Dense Gramians and their eigen-factors; limited to `dense_threshold`.
    Dense,
}

/// Solver statistics gathered by [`reduce`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReductionStats {
    pub mu_p: Option<f64>,
    pub mu_q: Option<f64>,
    pub dim_p: Option<usize>,
    pub dim_q: Option<usize>,
    pub rank_p: usize,
    pub rank_q: usize,
    /// Seconds spent on both Gramians (`std` feature only).
    pub gramian_time: Option<f64>,
    /// Seconds spent in the square-root step (`std` feature only).
    pub reduction_time: Option<f64>,
}

impl ReductionStats {
    /// Gramian time plus reduction time.
    pub fn t_mor(&self) -> Option<f64> {
        Some(self.gramian_time? + self.reduction_time?)
    }
}

/// `(A_r, B_r, C_r, D_r)` with the projectors that produced it.
#[derive(Clone, Debug)]
pub struct ReducedModel {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
    pub d: Mat,
    /// Right projector `n x r`.
    pub t: Mat,
    /// Left projector `n x r`.
    pub s: Mat,
    /// Retained singular values.
    pub hsv: Vec<f64>,
    /// All nonzero singular values of `Z_Q^T M Z_P`.
    pub hsv_all: Vec<f64>,
    pub stable: bool,
    pub mode: Mode,
    pub window: Option<TimeWindow>,
    /// `sigma_r` and `sigma_{r+1}` coincide; the cut follows SVD order.
    pub tie_warning: bool,
    pub stats: ReductionStats,
}

impl ReducedModel {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn to_system(&self) -> Result<LtiSystem> {
        Ok(StandardSystem::new(Operator::Dense(self.a.clone()), self.b.clone(), self.c.clone(), Some(self.d.clone()))?
            .into())
    }

    /// `2 * sum` of the discarded singular values.
    pub fn error_bound(&self) -> f64 {
        hinf_error_bound(&self.hsv_all, self.order())
    }
}

/// Hankel-type singular values with their provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct HsvReport {
    pub values: Vec<f64>,
    pub source: GramianKind,
}

/// Singular values of `Z_Q^T M Z_P`.
pub fn hankel_sv(zp: &Mat, zq: &Mat, sys: &LtiSystem, source: GramianKind) -> Result<HsvReport> {
    let g = zq.tr_matmul(&sys.mass_apply(zp)?);
    Ok(HsvReport {
        values: singular_values(&g)?,
        source,
    })
}

/// `2 * sum_{j > r} sigma_j`.
pub fn hinf_error_bound(hsv: &[f64], r: usize) -> f64 {
    2.0 * hsv.iter().skip(r).sum::<f64>()
}

/// `#{i : lambda_i > eps * lambda_1}` of a symmetric positive semidefinite matrix.
pub fn numerical_rank(s: &Mat, eps: f64) -> Result<usize> {
    let ev = sym_eigvals(s)?;
    Ok(count_above(&ev, eps))
}

/// [`numerical_rank`] of `Z Z^T`, computed from the singular values of `Z`.
pub fn numerical_rank_factor(z: &Mat, eps: f64) -> Result<usize> {
    let sv = singular_values(z)?;
    let ev: Vec<f64> = sv.iter().map(|s| s * s).collect();
    Ok(count_above(&ev, eps))
}

fn count_above(ev: &[f64], eps: f64) -> usize {
    let top = ev.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return 0;
    }
    ev.iter().filter(|&&v| v > eps * top).count()
}

/// Square-root balancing with factors in original coordinates.
/// The returned model is tagged `Mode::Bt` without a window; [`reduce`] sets both.
pub fn square_root_reduce(zp: &Mat, zq: &Mat, sys: &LtiSystem, order: OrderSelection) -> Result<ReducedModel> {
    let n = sys.order();
    if zp.nrows() != n || zq.nrows() != n {
        return Err(Error::DimensionMismatch("factor rows != state dimension"));
    }
    let g = zq.tr_matmul(&sys.mass_apply(zp)?);
    let f = svd(&g)?;
    let sigma = &f.s;
    let top = sigma.first().copied().unwrap_or(0.0);
    let rank = sigma.iter().take_while(|&&s| s > RANK_TOL * top && s > 0.0).count();
    let r = match order {
        OrderSelection::Fixed(r) => {
            if r == 0 || r > rank {
                return Err(Error::RankDeficient {
                    requested: r,
                    available: rank,
                });
            }
            r
        }
        OrderSelection::Tolerance(tol) => {
            if rank == 0 {
                return Err(Error::RankDeficient {
                    requested: 1,
                    available: 0,
                });
            }
            (1..=rank)
                .find(|&r| hinf_error_bound(&sigma[..rank], r) <= tol)
                .unwrap_or(rank)
        }
    };
    let tie_warning = r < sigma.len() && (sigma[r - 1] - sigma[r]).abs() <= 1e-12 * sigma[r - 1];
    let mut t = zp.matmul(&f.v.columns(0, r));
    let mut s = zq.matmul(&f.u.columns(0, r));
    for j in 0..r {
        let w = 1.0 / libm::sqrt(sigma[j]);
        t.col_mut(j).iter_mut().for_each(|x| *x *= w);
        s.col_mut(j).iter_mut().for_each(|x| *x *= w);
    }
    let a = s.tr_matmul(&sys.a().apply(&t)?);
    let b = s.tr_matmul(sys.b());
    let c = sys.c().matmul(&t);
    let stable = is_stable(&a)?;
    Ok(ReducedModel {
        a,
        b,
        c,
        d: sys.d().clone(),
        t,
        s,
        hsv: sigma[..r].to_vec(),
        hsv_all: sigma[..rank].to_vec(),
        stable,
        mode: Mode::Bt,
        window: None,
        tie_warning,
        stats: ReductionStats::default(),
    })
}

/// All eigenvalues satisfy `Re lambda < -1e-12 * ||A||_2`.
pub fn is_stable(a: &Mat) -> Result<bool> {
    if a.nrows() == 0 {
        return Ok(true);
    }
    let thr = -1e-12 * a.norm2();
    Ok(eigvals(a)?.iter().all(|l| l.re < thr))
}

/// Gramian factors `(Z_P, Z_Q)` of the requested kind.
pub fn gramian_factors(
    sys: &LtiSystem,
    kind: GramianKind,
    method: GramianMethod,
    cfg: &SolverConfig,
    stats: &mut ReductionStats,
) -> Result<(Mat, Mat)> {
    let dual = sys.dual()?;
    match method {
        GramianMethod::Krylov => {
            let p = solve_gramian(sys, kind, cfg)?;
            let q = solve_gramian(&dual, kind, cfg)?;
            stats.mu_p = Some(p.mu);
            stats.mu_q = Some(q.mu);
            stats.dim_p = Some(p.dim);
            stats.dim_q = Some(q.dim);
            stats.rank_p = p.rank;
            stats.rank_q = q.rank;
            stats.gramian_time = p.wall_time.zip(q.wall_time).map(|(a, b)| a + b);
            Ok((p.z, q.z))
        }
        GramianMethod::Dense => {
            if sys.order() > cfg.dense_threshold {
                return Err(Error::InvalidConfig("order exceeds the dense threshold"));
            }
            let clock = Stopwatch::start();
            let dense = |s: &LtiSystem| -> Result<Mat> {
                let p = match kind {
                    GramianKind::Infinite => gramian_infinite_dense(s)?,
                    GramianKind::TimeLimited(w) => gramian_timelimited_dense(s, w)?,
                    GramianKind::Modified(w) => gramian_modified_dense(s, w)?,
                };
                psd_factor(&p, 1e-15)
            };
            let zp = dense(sys)?;
            let zq = dense(&dual)?;
            stats.rank_p = zp.ncols();
            stats.rank_q = zq.ncols();
            stats.gramian_time = clock.elapsed();
            Ok((zp, zq))
        }
    }
}

/// Full pipeline: both Gramians of the chosen kind, then square-root balancing.
pub fn reduce(
    sys: &LtiSystem,
    mode: Mode,
    window: Option<TimeWindow>,
    order: OrderSelection,
    cfg: &SolverConfig,
) -> Result<ReducedModel> {
    reduce_with(sys, mode, window, order, cfg, GramianMethod::Krylov)
}

pub fn reduce_with(
    sys: &LtiSystem,
    mode: Mode,
    window: Option<TimeWindow>,
    order: OrderSelection,
    cfg: &SolverConfig,
    method: GramianMethod,
) -> Result<ReducedModel> {
    let kind = mode.gramian_kind(window)?;
    let mut stats = ReductionStats::default();
    let (zp, zq) = gramian_factors(sys, kind, method, cfg, &mut stats)?;
    let clock = Stopwatch::start();
    let mut rm = square_root_reduce(&zp, &zq, sys, order)?;
    stats.reduction_time = clock.elapsed();
    rm.mode = mode;
    rm.window = kind.window();
    rm.stats = stats;
    Ok(rm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rand_stable, rng};
    use crate::model::{similarity_transform, transfer_eval};

    fn scalar() -> LtiSystem {
        StandardSystem::dense(Mat::from_rows(&[&[-1.0]]), Mat::from_rows(&[&[1.0]]), Mat::from_rows(&[&[1.0]]))
            .unwrap()
            .into()
    }

    fn exact_factors(sys: &LtiSystem, kind: GramianKind) -> (Mat, Mat) {
        let mut st = ReductionStats::default();
        gramian_factors(sys, kind, GramianMethod::Dense, &SolverConfig::default(), &mut st).unwrap()
    }

    #[test]
    fn scalar_balancing() {
        let s = scalar();
        let (zp, zq) = exact_factors(&s, GramianKind::Infinite);
        let rm = square_root_reduce(&zp, &zq, &s, OrderSelection::Fixed(1)).unwrap();
        assert!((rm.a[(0, 0)] + 1.0).abs() < 1e-14);
        assert!((rm.b[(0, 0)] * rm.c[(0, 0)] - 1.0).abs() < 1e-14);
        assert!(rm.stable);
        let h = hankel_sv(&zp, &zq, &s, GramianKind::Infinite).unwrap();
        assert!((h.values[0] - 0.5).abs() < 1e-15);
        let bt = reduce(&s, Mode::Bt, None, OrderSelection::Fixed(1), &SolverConfig::default()).unwrap();
        assert!((bt.a[(0, 0)] - rm.a[(0, 0)]).abs() < 1e-12);
    }

    #[test]
    fn decoupled_keeps_dominant_state() {
        let s: LtiSystem = StandardSystem::dense(
            Mat::diag(&[-1.0, -10.0]),
            Mat::col_vector(&[1.0, 1.0]),
            Mat::from_rows(&[&[1.0, 1.0]]),
        )
        .unwrap()
        .into();
        let (zp, zq) = exact_factors(&s, GramianKind::Infinite);
        let rm = square_root_reduce(&zp, &zq, &s, OrderSelection::Fixed(1)).unwrap();
        let h0 = -rm.c[(0, 0)] * rm.b[(0, 0)] / rm.a[(0, 0)];
        // dominant term 1/(s+1) contributes 1 at s = 0; truncating the other gives 1, keeping it 0.1
        assert!((h0 - 1.0).abs() < 0.1 && (rm.a[(0, 0)] + 1.0).abs() < 0.5);
    }

    #[test]
    fn full_order_preserves_transfer() {
        let mut g = rng(91);
        let n = 8;
        let s: LtiSystem = StandardSystem::dense(rand_stable(&mut g, n), rand_mat(&mut g, n, 2), rand_mat(&mut g, 2, n))
            .unwrap()
            .into();
        let (zp, zq) = exact_factors(&s, GramianKind::Infinite);
        let rm = square_root_reduce(&zp, &zq, &s, OrderSelection::Fixed(n)).unwrap();
        let r = rm.to_system().unwrap();
        for k in 0..10 {
            let w = 0.01 * libm::pow(10.0, 0.4 * k as f64);
            let h = transfer_eval(&s, w).unwrap();
            let hr = transfer_eval(&r, w).unwrap();
            assert!(h.sub(&hr).max_abs() <= 1e-9 * h.max_abs());
        }
        let i = rm.s.tr_matmul(&rm.t).sub(&Mat::identity(n));
        assert!(i.max_abs() < 1e-8);
    }

    #[test]
    fn error_bound_values() {
        assert_eq!(hinf_error_bound(&[3.0, 2.0, 1.0], 2), 2.0);
        assert_eq!(hinf_error_bound(&[3.0, 2.0, 1.0], 3), 0.0);
        assert_eq!(hinf_error_bound(&[3.0, 2.0, 1.0], 0), 12.0);
    }

    #[test]
    fn numerical_rank_values() {
        assert_eq!(numerical_rank(&Mat::identity(4), 0.5).unwrap(), 4);
        assert_eq!(numerical_rank(&Mat::diag(&[1.0, 1e-9]), 1e-6).unwrap(), 1);
        assert_eq!(numerical_rank_factor(&Mat::diag(&[1.0, 1e-4]), 1e-6).unwrap(), 1);
    }

    #[test]
    fn zero_factor_and_rank_deficiency() {
        let s = scalar();
        let z = Mat::zeros(1, 1);
        let h = hankel_sv(&z, &z, &s, GramianKind::Infinite).unwrap();
        assert!(h.values.iter().all(|&v| v == 0.0));
        let (zp, zq) = exact_factors(&s, GramianKind::Infinite);
        assert_eq!(
            square_root_reduce(&zp, &zq, &s, OrderSelection::Fixed(2)).unwrap_err(),
            Error::RankDeficient {
                requested: 2,
                available: 1
            }
        );
    }

    #[test]
    fn tolerance_order_and_tie() {
        let s: LtiSystem = StandardSystem::dense(
            Mat::diag(&[-1.0, -1.0]),
            Mat::identity(2),
            Mat::identity(2),
        )
        .unwrap()
        .into();
        let (zp, zq) = exact_factors(&s, GramianKind::Infinite);
        let rm = square_root_reduce(&zp, &zq, &s, OrderSelection::Fixed(1)).unwrap();
        assert!(rm.tie_warning);
        let rm = square_root_reduce(&zp, &zq, &s, OrderSelection::Tolerance(1e-12)).unwrap();
        assert_eq!(rm.order(), 2);
    }

    #[test]
    fn hsv_similarity_invariance() {
        let mut g = rng(92);
        let n = 20;
        let st = StandardSystem::dense(rand_stable(&mut g, n), rand_mat(&mut g, n, 1), rand_mat(&mut g, 1, n)).unwrap();
        let kind = GramianKind::TimeLimited(TimeWindow::to(1.0).unwrap());
        let s: LtiSystem = st.clone().into();
        let (zp, zq) = exact_factors(&s, kind);
        let h0 = hankel_sv(&zp, &zq, &s, kind).unwrap().values;
        let t = rand_mat(&mut g, n, n).add(&Mat::identity(n).scaled(4.0));
        let s2: LtiSystem = similarity_transform(&st, &t).unwrap().into();
        let (zp, zq) = exact_factors(&s2, kind);
        let h1 = hankel_sv(&zp, &zq, &s2, kind).unwrap().values;
        for j in 0..5 {
            assert!((h0[j] - h1[j]).abs() <= 1e-8 * h0[j]);
        }
    }

    #[test]
    fn long_window_tlbt_matches_bt() {
        let mut g = rng(93);
        let n = 30;
        let s: LtiSystem = StandardSystem::dense(rand_stable(&mut g, n), rand_mat(&mut g, n, 1), rand_mat(&mut g, 1, n))
            .unwrap()
            .into();
        let cfg = SolverConfig::default();
        let bt = reduce(&s, Mode::Bt, None, OrderSelection::Fixed(6), &cfg).unwrap();
        let tl = reduce(&s, Mode::Tlbt, Some(TimeWindow::to(500.0).unwrap()), OrderSelection::Fixed(6), &cfg).unwrap();
        let (b, t) = (bt.to_system().unwrap(), tl.to_system().unwrap());
        for w in [0.0, 0.3, 1.0, 5.0] {
            let hb = transfer_eval(&b, w).unwrap();
            let ht = transfer_eval(&t, w).unwrap();
            assert!(hb.sub(&ht).max_abs() <= 1e-6 * hb.max_abs());
        }
        assert_eq!(tl.mode, Mode::Tlbt);
        assert!(tl.stats.mu_p.unwrap() < 1e-8);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(Mode::parse("MTLBT"), Some(Mode::Mtlbt));
        assert_eq!(Mode::parse("x"), None);
        assert_eq!(Mode::Tlbt.gramian_kind(None).unwrap_err(), Error::InvalidWindow);
    }
}
