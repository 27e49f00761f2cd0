use proptest::prelude::*;
use tlbt_core::gramians::{
    gramian_infinite_dense, gramian_timelimited_dense, gramian_timelimited_lyapunov, solve_gramian, GramianKind,
    SolverConfig, TimeWindow,
};
use tlbt_core::linalg::{lyap_dense, lyap_residual, orthonormal_extend, Mat};
use tlbt_core::model::LtiSystem;
use tlbt_core::reduction::{reduce_with, GramianMethod, Mode, OrderSelection};
use tlbt_core::simulate::{impulse_response, mac};
use tlbt_core::synth;

fn small_system(n: usize, m: usize, seed: u64) -> LtiSystem {
    synth::random_stable(n, m, m, seed).unwrap()
}

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn lyapunov_residual_is_small(n in 2usize..25, seed in 0u64..1000) {
        let sys = small_system(n, 2, seed);
        let a = sys.a().to_dense().unwrap();
        let w = sys.b().matmul_tr(sys.b());
        let x = lyap_dense(&a, &w).unwrap();
        let scale = a.norm_fro() * x.norm_fro() + w.norm_fro();
        prop_assert!(lyap_residual(&a, &x, &w) <= 1e-12 * scale);
    }

    #[test]
    fn time_limited_forms_agree(n in 2usize..20, seed in 0u64..1000, ts in 0.0f64..1.0, len in 0.1f64..3.0) {
        let sys = small_system(n, 1, seed);
        let w = TimeWindow::new(ts, ts + len).unwrap();
        let a = gramian_timelimited_dense(&sys, w).unwrap();
        let b = gramian_timelimited_lyapunov(&sys, w).unwrap();
        prop_assert!(a.sub(&b).norm_fro() <= 1e-9 * b.norm_fro());
    }

    #[test]
    fn time_limited_below_infinite(n in 2usize..20, seed in 0u64..1000, te in 0.1f64..5.0) {
        let sys = small_system(n, 2, seed);
        let pinf = gramian_infinite_dense(&sys).unwrap();
        let pt = gramian_timelimited_dense(&sys, TimeWindow::to(te).unwrap()).unwrap();
        let ev = tlbt_core::linalg::sym_eigvals(&pinf.sub(&pt).symmetrized()).unwrap();
        prop_assert!(*ev.last().unwrap() >= -1e-12 * pinf.norm_fro());
    }

    #[test]
    fn extension_stays_orthonormal(rows in 3usize..15, cols in 1usize..4, seed in 0u64..1000) {
        let v = synth::random_stable(rows, cols, 1, seed).unwrap().b().clone();
        let q0 = Mat::zeros(rows, 0);
        let q = orthonormal_extend(&q0, &v);
        let q = orthonormal_extend(&q, &v);
        let g = q.tr_matmul(&q).sub(&Mat::identity(q.ncols()));
        prop_assert!(g.max_abs() <= 1e-12);
        prop_assert!(q.ncols() <= cols);
    }

    #[test]
    fn mac_is_bounded_and_symmetric(x in prop::collection::vec(-5.0f64..5.0, 4), y in prop::collection::vec(-5.0f64..5.0, 4)) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3) && y.iter().any(|v| v.abs() > 1e-3));
        let a = mac(&x, &y).unwrap();
        let b = mac(&y, &x).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() <= 1e-15);
    }
}

#[test]
fn krylov_and_dense_reductions_agree() {
    let sys = small_system(30, 2, 12);
    let cfg = SolverConfig::default();
    let w = TimeWindow::new(0.1, 1.0).unwrap();
    for mode in [Mode::Bt, Mode::Tlbt, Mode::Mtlbt] {
        let k = reduce_with(&sys, mode, Some(w), OrderSelection::Fixed(5), &cfg, GramianMethod::Krylov).unwrap();
        let d = reduce_with(&sys, mode, Some(w), OrderSelection::Fixed(5), &cfg, GramianMethod::Dense).unwrap();
        for (a, b) in k.hsv.iter().zip(&d.hsv) {
            assert!((a - b).abs() <= 1e-6 * d.hsv[0], "{mode:?}: {a} vs {b}");
        }
    }
}

#[test]
fn generalized_krylov_matches_dense() {
    let sys = synth::heat_like(60, 2, 2, 4).unwrap();
    let w = TimeWindow::new(0.01, 0.2).unwrap();
    let g = solve_gramian(&sys, GramianKind::TimeLimited(w), &SolverConfig::default()).unwrap();
    let p = gramian_timelimited_dense(&sys, w).unwrap();
    assert!(g.dense().sub(&p).norm_fro() <= 1e-6 * p.norm_fro());
    assert!(g.mu <= 1e-8);
}

#[test]
fn reduced_impulse_tracks_full_model() {
    let sys = synth::weakly_damped(40, 1, 1, 9, 0.05).unwrap();
    let rm = reduce_with(
        &sys,
        Mode::Tlbt,
        Some(TimeWindow::to(10.0).unwrap()),
        OrderSelection::Fixed(30),
        &SolverConfig::default(),
        GramianMethod::Krylov,
    )
    .unwrap();
    let y = impulse_response(&sys, None, 0.05, 10.0).unwrap();
    let yr = impulse_response(&rm.to_system().unwrap(), None, 0.05, 10.0).unwrap();
    let peak = y.outputs.max_abs();
    assert!(y.outputs.sub(&yr.outputs).max_abs() <= 1e-3 * peak);
}

#[test]
fn stiff_heat_converges_early() {
    let sys = synth::heat_like(400, 2, 2, 0).unwrap();
    let cfg = SolverConfig::default();
    for kind in [GramianKind::Infinite, GramianKind::TimeLimited(TimeWindow::to(0.1).unwrap())] {
        let g = solve_gramian(&sys, kind, &cfg).unwrap();
        assert!(g.dim <= 150, "dim {}", g.dim);
        assert!(g.mu < cfg.tol_p);
    }
}
