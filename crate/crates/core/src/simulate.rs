//! Time-domain validation: implicit midpoint integration, impulse and step
//! responses, relative output errors and the modal assurance criterion.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::{mass_solve, LtiSystem};

/// Input applied during a simulation.
pub enum InputSignal {
    /// `u = v delta(t)`, realized through the initial condition `M x0 = B v`.
    Impulse(Vec<f64>),
    /// `u(t) = c` for all `t`.
    Constant(Vec<f64>),
    Custom(Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>),
}

impl InputSignal {
    /// `u = c * 1_m`.
    pub fn step(m: usize, c: f64) -> Self {
        InputSignal::Constant(vec![c; m])
    }

    fn at(&self, t: f64, m: usize) -> Vec<f64> {
        match self {
            InputSignal::Impulse(_) => vec![0.0; m],
            InputSignal::Constant(c) => c.clone(),
            InputSignal::Custom(f) => f(t),
        }
    }
}

/// Outputs on a uniform grid `t_k = k dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `len(times) x p`, one row per time point.
    pub outputs: Mat,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `||y(t_k)||_2` for every grid point.
    pub fn output_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|k| row_norm(&self.outputs, k)).collect()
    }
}

fn row_norm(m: &Mat, k: usize) -> f64 {
    let row: Vec<f64> = (0..m.ncols()).map(|j| m[(k, j)]).collect();
    crate::linalg::vec_norm(&row)
}

/// Implicit midpoint rule
/// `(M - h A) x_{k+1} = (M + h A) x_k + dt B u(t_k + h)`, `h = dt / 2`,
/// with `y_k = C x_k + D u(t_k)`. Impulse inputs enter through `x0` only.
pub fn implicit_midpoint(sys: &LtiSystem, u: &InputSignal, x0: &[f64], dt: f64, t_f: f64) -> Result<Trajectory> {
    let n = sys.order();
    let m = sys.inputs();
    if x0.len() != n {
        return Err(Error::DimensionMismatch("initial state length"));
    }
    if !(dt > 0.0) || !(t_f >= 0.0) || !dt.is_finite() || !t_f.is_finite() {
        return Err(Error::InvalidConfig("dt must be positive and t_f non-negative"));
    }
    let steps = libm::round(t_f / dt) as usize;
    let h = 0.5 * dt;
    let factor = sys
        .a()
        .factor_shifted(1.0 / h, sys.mass())
        .map_err(|e| match e {
            Error::SingularShift => Error::SingularStep,
            other => other,
        })?;
    let impulse = matches!(u, InputSignal::Impulse(_));
    let mut x = Mat::col_vector(x0);
    let mut times = Vec::with_capacity(steps + 1);
    let mut out = Mat::zeros(steps + 1, sys.outputs());
    for k in 0..=steps {
        let t = k as f64 * dt;
        times.push(t);
        let mut y = sys.c().matmul(&x);
        if !impulse {
            let uk = Mat::col_vector(&u.at(t, m));
            y = y.add(&sys.d().matmul(&uk));
        }
        for j in 0..y.nrows() {
            out[(k, j)] = y[(j, 0)];
        }
        if k == steps {
            break;
        }
        // x+ = -(1/h) (A - M/h)^{-1} [(M + h A) x + dt B u(t + h)]
        let mut rhs = sys.mass_apply(&x)?;
        rhs.axpy(h, &sys.a().apply(&x)?);
        if !impulse {
            let um = Mat::col_vector(&u.at(t + h, m));
            rhs.axpy(dt, &sys.b().matmul(&um));
        }
        x = factor.solve(&rhs)?.scaled(-1.0 / h);
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    Ok(Trajectory { times, outputs: out })
}

/// Response to `u = v delta(t)` (default `v = 1_m`), started from `M x0 = B v`.
/// The feed-through does not enter.
pub fn impulse_response(sys: &LtiSystem, v: Option<&[f64]>, dt: f64, t_f: f64) -> Result<Trajectory> {
    let m = sys.inputs();
    let v: Vec<f64> = match v {
        Some(v) if v.len() == m => v.to_vec(),
        Some(_) => return Err(Error::DimensionMismatch("impulse direction length")),
        None => vec![1.0; m],
    };
    let bv = sys.b().matmul(&Mat::col_vector(&v));
    let x0 = mass_solve(sys, &bv)?;
    implicit_midpoint(sys, &InputSignal::Impulse(v), x0.col(0), dt, t_f)
}

/// Step response `u = c 1_m` from rest.
pub fn step_response(sys: &LtiSystem, c: f64, dt: f64, t_f: f64) -> Result<Trajectory> {
    let x0 = vec![0.0; sys.order()];
    implicit_midpoint(sys, &InputSignal::step(sys.inputs(), c), &x0, dt, t_f)
}

/// Pointwise relative output error and its maximum over a window.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    /// `E(t_k) = ||y - y_r|| / ||y||`.
    pub e: Vec<f64>,
    /// `max E(t)` over the window.
    pub e_max: f64,
}

/// `E(t) = ||y(t) - y_r(t)||_2 / ||y(t)||_2`; points with `||y|| <= 1e-300` give
/// `0` if both outputs vanish and `inf` otherwise. `window = (t_s, t_e)` limits the
/// maximum; `None` uses the whole grid.
pub fn relative_error_series(y: &Trajectory, yr: &Trajectory, window: Option<(f64, f64)>) -> Result<ErrorSeries> {
    if y.len() != yr.len() || y.outputs.ncols() != yr.outputs.ncols() {
        return Err(Error::GridMismatch);
    }
    for (a, b) in y.times.iter().zip(&yr.times) {
        if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
            return Err(Error::GridMismatch);
        }
    }
    let diff = y.outputs.sub(&yr.outputs);
    let mut e = Vec::with_capacity(y.len());
    for k in 0..y.len() {
        let ny = row_norm(&y.outputs, k);
        let nd = row_norm(&diff, k);
        e.push(if ny <= 1e-300 {
            if row_norm(&yr.outputs, k) <= 1e-300 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            nd / ny
        });
    }
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let tol = 1e-9 * hi.abs().max(1.0);
    let e_max = y
        .times
        .iter()
        .zip(&e)
        .filter(|(t, _)| **t >= lo - tol && **t <= hi + tol)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    Ok(ErrorSeries {
        times: y.times.clone(),
        e,
        e_max,
    })
}

/// Modal assurance criterion `|y^T x|^2 / (||x||^2 ||y||^2)`.
pub fn mac(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch("mac: vector lengths"));
    }
    let nx: f64 = x.iter().map(|v| v * v).sum();
    let ny: f64 = y.iter().map(|v| v * v).sum();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let d: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok((d * d / (nx * ny)).min(1.0))
}

/// `mac` between every column of `x` and every column of `y`.
pub fn mac_matrix(x: &Mat, y: &Mat) -> Result<Mat> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch("mac: row counts"));
    }
    let mut out = Mat::zeros(x.ncols(), y.ncols());
    for i in 0..x.ncols() {
        for j in 0..y.ncols() {
            out[(i, j)] = mac(x.col(i), y.col(j))?;
        }
    }
    Ok(out)
}

/// First grid time after which `||y||` never again exceeds half its maximum.
pub fn half_decay_time(traj: &Trajectory) -> Option<f64> {
    let norms = traj.output_norms();
    let peak = norms.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let mut env = 0.0f64;
    let mut idx = None;
    for k in (0..norms.len()).rev() {
        env = env.max(norms[k]);
        if env <= 0.5 * peak {
            idx = Some(k);
        } else {
            break;
        }
    }
    idx.map(|k| traj.times[k])
}
