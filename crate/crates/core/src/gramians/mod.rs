//! Infinite, time-limited and modified time-limited Gramians: dense oracles,
//! the eigen/Cauchy representation and the rational Krylov low-rank solver.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::C64;

mod dense;
mod rksm;
mod shifts;

pub use dense::{
    gramian_infinite_dense, gramian_modified_dense, gramian_timelimited_cauchy,
    gramian_timelimited_dense, gramian_timelimited_lyapunov, psd_factor,
};
pub use rksm::{
    expm_action_approx, modified_rhs, solve_gramian, solve_infinite_lowrank,
    solve_modified_lowrank, solve_timelimited_lowrank, KrylovWorkspace,
};
pub use shifts::{adaptive_shift, SHIFT_CANDIDATES};

/// Integration window `[t_s, t_e]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeWindow {
    pub t_s: f64,
    pub t_e: f64,
}

impl TimeWindow {
    pub fn new(t_s: f64, t_e: f64) -> Result<Self> {
        if !(t_s >= 0.0 && t_s < t_e && t_e.is_finite()) {
            return Err(Error::InvalidWindow);
        }
        Ok(TimeWindow { t_s, t_e })
    }

    /// `[0, t_e]`.
    pub fn to(t_e: f64) -> Result<Self> {
        Self::new(0.0, t_e)
    }
}

/// Which Gramian to compute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GramianKind {
    Infinite,
    TimeLimited(TimeWindow),
    Modified(TimeWindow),
}

impl GramianKind {
    pub fn window(&self) -> Option<TimeWindow> {
        match self {
            GramianKind::Infinite => None,
            GramianKind::TimeLimited(w) | GramianKind::Modified(w) => Some(*w),
        }
    }
}

/// Parameters of the rational Krylov solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Relative change threshold for the exponential action.
    pub tol_f: f64,
    /// Scaled Lyapunov residual threshold.
    pub tol_p: f64,
    /// Iterations between convergence checks.
    pub cadence: usize,
    /// Subspace dimension cap.
    pub max_dim: usize,
    /// Eigenvalues of the projected solution below `trunc_tol * gamma_1` are dropped.
    pub trunc_tol: f64,
    /// Largest order for which dense paths are offered.
    pub dense_threshold: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_f: 1e-8,
            tol_p: 1e-8,
            cadence: 5,
            max_dim: 600,
            trunc_tol: 1e-12,
            dense_threshold: 1000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !unit(self.tol_f) || !unit(self.tol_p) {
            return Err(Error::InvalidConfig("tolerances must lie in (0, 1)"));
        }
        if self.cadence == 0 {
            return Err(Error::InvalidConfig("check cadence must be at least 1"));
        }
        if self.max_dim == 0 {
            return Err(Error::InvalidConfig("max_dim must be positive"));
        }
        if !(self.trunc_tol >= 0.0 && self.trunc_tol < 1.0) {
            return Err(Error::InvalidConfig("trunc_tol must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// One row of the solver trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// `None` stands for the initial pole at infinity.
    pub shift: Option<C64>,
    pub dim: usize,
    pub f_change: Option<f64>,
    pub mu: Option<f64>,
}

/// `Z Z^T` approximates a Gramian.
#[derive(Clone, Debug)]
pub struct LowRankGramian {
    /// `n x rank` factor in original coordinates.
    pub z: Mat,
    /// Scaled residual of the returned factor.
    pub mu: f64,
    /// Subspace dimension.
    pub dim: usize,
    pub rank: usize,
    /// Seconds; only measured with the `std` feature.
    pub wall_time: Option<f64>,
    pub trace: Vec<TraceRow>,
}

impl LowRankGramian {
    pub fn dense(&self) -> Mat {
        self.z.matmul_tr(&self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_and_config_checks() {
        assert!(TimeWindow::new(0.0, 1.0).is_ok());
        assert_eq!(TimeWindow::new(1.0, 1.0).unwrap_err(), Error::InvalidWindow);
        assert_eq!(
            TimeWindow::new(-1.0, 1.0).unwrap_err(),
            Error::InvalidWindow
        );
        assert_eq!(
            TimeWindow::new(0.0, f64::INFINITY).unwrap_err(),
            Error::InvalidWindow
        );
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            cadence: 0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
