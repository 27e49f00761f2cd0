//! Deterministic synthetic test systems.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigvals, Mat};
use crate::model::{GeneralizedSystem, LtiSystem, Operator, StandardSystem};
use crate::sparse::Csc;

/// Default damping ratio of [`weakly_damped`].
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    WeaklyDamped,
    HeatLike,
    RandomStable,
}

impl SynthKind {
    pub fn parse(s: &str) -> Option<SynthKind> {
        match s {
            "weakly_damped" => Some(SynthKind::WeaklyDamped),
            "heat_like" => Some(SynthKind::HeatLike),
            "random_stable" => Some(SynthKind::RandomStable),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SynthKind::WeaklyDamped => "weakly_damped",
            SynthKind::HeatLike => "heat_like",
            SynthKind::RandomStable => "random_stable",
        }
    }
}

pub fn make_synthetic(kind: SynthKind, n: usize, m: usize, p: usize, seed: u64) -> Result<LtiSystem> {
    match kind {
        SynthKind::WeaklyDamped => weakly_damped(n, m, p, seed, DEFAULT_ALPHA),
        SynthKind::HeatLike => heat_like(n, m, p, seed),
        SynthKind::RandomStable => random_stable(n, m, p, seed),
    }
}

fn check(n: usize, m: usize, p: usize) -> Result<()> {
    if n < 2 || m == 0 || p == 0 {
        return Err(Error::InvalidConfig("synthetic systems need n >= 2, m >= 1, p >= 1"));
    }
    Ok(())
}

/// Lightly damped oscillator chain: 2x2 blocks `[[-a_j, b_j], [-b_j, -a_j]]` with
/// `b_1 = 1`, the other `b_j` uniform in `[1, 10]` (sorted) and `a_j = alpha b_j`,
/// so the spectral abscissa is `-alpha`. Rows of `B` and columns of `C` are
/// scaled by `1 / b_j`. Odd `n` adds one real mode `-10 alpha`. `A` is sparse.
pub fn weakly_damped(n: usize, m: usize, p: usize, seed: u64, alpha: f64) -> Result<LtiSystem> {
    check(n, m, p)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidConfig("alpha must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = n / 2;
    let mut betas: Vec<f64> = (1..k).map(|_| rng.gen_range(1.0..10.0)).collect();
    betas.push(1.0);
    betas.sort_by(f64::total_cmp);
    let mut trip = Vec::with_capacity(4 * k + 1);
    let mut weight = Vec::with_capacity(n);
    for (j, &b) in betas.iter().enumerate() {
        let (i0, i1) = (2 * j, 2 * j + 1);
        let a = alpha * b;
        trip.push((i0, i0, -a));
        trip.push((i0, i1, b));
        trip.push((i1, i0, -b));
        trip.push((i1, i1, -a));
        weight.push(1.0 / b);
        weight.push(1.0 / b);
    }
    if n % 2 == 1 {
        trip.push((n - 1, n - 1, -10.0 * alpha));
        weight.push(0.1);
    }
    let a = Csc::from_triplets(n, n, &trip)?;
    let b = Mat::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
    let b = Mat::from_fn(n, m, |i, j| b[(i, j)] * weight[i]);
    let c = Mat::from_fn(p, n, |_, _| rng.gen_range(-1.0..1.0));
    let c = Mat::from_fn(p, n, |i, j| c[(i, j)] * weight[j]);
    Ok(StandardSystem::new(Operator::Sparse(a), b, c, None)?.into())
}

/// Linear finite elements for the 1-D heat equation on `(0, 1)` with
/// homogeneous Dirichlet conditions: `M = h/6 tridiag(1, 4, 1)`,
/// `A = -1/h tridiag(-1, 2, -1)`, `h = 1 / (n + 1)`. Each input acts on a random
/// patch of `n / 10` nodes; outputs are random nonnegative averages.
pub fn heat_like(n: usize, m: usize, p: usize, seed: u64) -> Result<LtiSystem> {
    check(n, m, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / (n as f64 + 1.0);
    let mut tm = Vec::with_capacity(3 * n);
    let mut ta = Vec::with_capacity(3 * n);
    for i in 0..n {
        tm.push((i, i, 4.0 * h / 6.0));
        ta.push((i, i, -2.0 / h));
        if i + 1 < n {
            tm.push((i, i + 1, h / 6.0));
            tm.push((i + 1, i, h / 6.0));
            ta.push((i, i + 1, 1.0 / h));
            ta.push((i + 1, i, 1.0 / h));
        }
    }
    let patch = (n / 10).max(1);
    let mut b = Mat::zeros(n, m);
    for j in 0..m {
        let start = rng.gen_range(0..=n - patch);
        for i in start..start + patch {
            b[(i, j)] = h;
        }
    }
    let c = Mat::from_fn(p, n, |_, _| rng.gen_range(0.0..1.0) * h);
    Ok(GeneralizedSystem::new(
        Operator::Sparse(Csc::from_triplets(n, n, &tm)?),
        Operator::Sparse(Csc::from_triplets(n, n, &ta)?),
        b,
        c,
        None,
        true,
    )?
    .into())
}

/// Dense `A = G - (lambda_max(sym G) + 0.5) I` with `G`, `B`, `C` uniform in `[-1, 1]`.
/// The symmetric part of `A` is negative definite.
pub fn random_stable(n: usize, m: usize, p: usize, seed: u64) -> Result<LtiSystem> {
    check(n, m, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let top = sym_eigvals(&g.symmetrized())?[0];
    let a = g.sub(&Mat::identity(n).scaled(top + 0.5));
    let b = Mat::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
    let c = Mat::from_fn(p, n, |_, _| rng.gen_range(-1.0..1.0));
    Ok(StandardSystem::dense(a, b, c)?.into())
}

/// `x' = -x + u, y = x`.
pub fn scalar() -> LtiSystem {
    StandardSystem::dense(Mat::from_rows(&[&[-1.0]]), Mat::from_rows(&[&[1.0]]), Mat::from_rows(&[&[1.0]]))
        .expect("valid scalar system")
        .into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sym_eigvals, Cholesky};
    use crate::model::spectral_abscissa;

    #[test]
    fn heat_like_structure() {
        let s = heat_like(50, 2, 2, 1).unwrap();
        let a = s.a().to_dense().unwrap();
        assert_eq!(a, a.transpose());
        assert!(sym_eigvals(&a).unwrap()[0] < 0.0);
        assert!(Cholesky::factor(&s.mass_dense().unwrap()).is_ok());
        assert!(s.mass_spd());
    }

    #[test]
    fn weakly_damped_abscissa() {
        for n in [10, 11] {
            let s = weakly_damped(n, 1, 1, 3, 0.05).unwrap();
            assert!((spectral_abscissa(&s).unwrap() + 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic() {
        for kind in [SynthKind::WeaklyDamped, SynthKind::HeatLike, SynthKind::RandomStable] {
            let a = make_synthetic(kind, 20, 2, 3, 9).unwrap();
            let b = make_synthetic(kind, 20, 2, 3, 9).unwrap();
            assert_eq!(a.a().to_dense().unwrap(), b.a().to_dense().unwrap());
            assert_eq!(a.b(), b.b());
            assert_eq!(a.c(), b.c());
            let c = make_synthetic(kind, 20, 2, 3, 10).unwrap();
            assert_ne!(a.c(), c.c());
        }
        assert!(make_synthetic(SynthKind::HeatLike, 1, 1, 1, 0).is_err());
    }

    #[test]
    fn random_stable_is_stable() {
        let s = random_stable(15, 1, 1, 4).unwrap();
        assert!(spectral_abscissa(&s).unwrap() < 0.0);
    }
}
