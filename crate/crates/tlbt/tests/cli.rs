use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tlbt::mm;

fn tlbt(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tlbt"));
    cmd.args(args);
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.env_remove("TLBT_DENSE_THRESHOLD");
    cmd.output().expect("spawn tlbt")
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "status {:?}\nstderr: {}",
        o.status,
        String::from_utf8_lossy(&o.stderr)
    );
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Parse `file` and validate it against `schemas/<name>.schema.json`.
fn checked(file: &Path, name: &str) -> Value {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).unwrap()).unwrap();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errs: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errs.is_empty(), "{} violates {name} schema: {errs:?}", file.display());
    doc
}

fn factor_value(path: &Path) -> f64 {
    let z = mm::read_file(path).unwrap().into_dense();
    assert_eq!(z.shape(), (1, 1));
    z[(0, 0)].abs()
}

#[test]
fn gramian_scalar_infinite() {
    let d = tempfile::tempdir().unwrap();
    ok(&tlbt(&["gramian", "--synth", "scalar", "--mode", "bt"], Some(d.path())));
    let s = checked(&d.path().join("gramian.json"), "gramian");
    let p = &s["gramians"][0];
    assert_eq!(p["gramian"], "P");
    assert_eq!(p["rank"], 1);
    assert!(p["mu"].as_f64().unwrap() <= 1e-8);
    assert!((factor_value(&d.path().join("bt/Z_P.mtx")) - 0.5f64.sqrt()).abs() < 1e-12);
    let trace = std::fs::read_to_string(d.path().join("bt/trace_P.csv")).unwrap();
    assert!(trace.starts_with("iteration,shift_re,shift_im,dim,f_change,mu\n0,inf,"));
}

#[test]
fn gramian_scalar_time_limited() {
    let d = tempfile::tempdir().unwrap();
    ok(&tlbt(&["gramian", "--synth", "scalar", "--mode", "tlbt,mtlbt", "--te", "1"], Some(d.path())));
    let s = checked(&d.path().join("gramian.json"), "gramian");
    assert_eq!(s["gramians"].as_array().unwrap().len(), 4);
    let z = factor_value(&d.path().join("tlbt/Z_P.mtx"));
    assert!((z - 0.4323324f64.sqrt()).abs() < 1e-6);
    ok(&tlbt(&["gramian", "--synth", "scalar", "--mode", "tlbt", "--te", "1", "--dense"], Some(d.path())));
    let s = checked(&d.path().join("gramian.json"), "gramian");
    assert_eq!(s["method"], "dense");
    assert!((factor_value(&d.path().join("tlbt/Z_P.mtx")) - z).abs() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let missing = tlbt(&["gramian", "--system", "/no/such/sidecar.json", "--mode", "bt"], Some(d.path()));
    assert_eq!(code(&missing), 2);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("no such file"));
    assert_eq!(code(&tlbt(&["gramian", "--synth", "scalar", "--mode", "tlbt"], Some(d.path()))), 2);
    assert_eq!(code(&tlbt(&["gramian", "--synth", "scalar", "--mode", "xx"], Some(d.path()))), 2);
    assert_eq!(code(&tlbt(&["gramian", "--synth", "scalar", "--mode", "bt", "--tol-f", "2"], None)), 2);
    assert_eq!(code(&tlbt(&["gramian", "--mode", "bt"], None)), 2);
    assert_eq!(code(&tlbt(&["reduce", "--synth", "scalar", "--mode", "bt"], None)), 2);
    assert_eq!(code(&tlbt(&["frobnicate"], None)), 2);
    let window = tlbt(&["gramian", "--synth", "scalar", "--mode", "tlbt", "--ts", "2", "--te", "1"], None);
    assert_eq!(code(&window), 2);
}

#[test]
fn compare_empty_modes_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let args = ["compare", "--synth", "scalar", "--mode", "", "--order", "1", "--dt", "0.1", "--tf", "1"];
    assert_eq!(code(&tlbt(&args, Some(d.path()))), 2);
    assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 0);
}

#[test]
fn rank_deficient_exit_3() {
    let d = tempfile::tempdir().unwrap();
    let o = tlbt(&["reduce", "--synth", "scalar", "--mode", "bt", "--order", "2"], Some(d.path()));
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds available numerical rank"));
}

#[test]
fn dense_threshold_from_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_tlbt"))
        .args(["gramian", "--synth", "random_stable", "--n", "10", "--mode", "bt", "--dense"])
        .env("TLBT_DENSE_THRESHOLD", "5")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dense threshold"));
}

#[test]
fn reduce_bt_small_system() {
    let d = tempfile::tempdir().unwrap();
    ok(&tlbt(&["reduce", "--synth", "random_stable", "--n", "10", "--mode", "bt", "--order", "2"], Some(d.path())));
    let s = checked(&d.path().join("reduce.json"), "reduce");
    let m = &s["models"][0];
    assert_eq!(m["stable"], 1);
    assert_eq!(m["r"], 2);
    assert!(m["E_T"].is_null());
    checked(&d.path().join("bt_r2/model.json"), "model");
    let a = mm::read_file(&d.path().join("bt_r2/A.mtx")).unwrap();
    assert_eq!(a.shape(), (2, 2));
    assert_eq!(mm::read_file(&d.path().join("bt_r2/T.mtx")).unwrap().shape(), (10, 2));
}

#[test]
fn reduce_by_tolerance() {
    let d = tempfile::tempdir().unwrap();
    ok(&tlbt(&["reduce", "--synth", "random_stable", "--n", "12", "--mode", "bt", "--tol", "1e-3"], Some(d.path())));
    let s = checked(&d.path().join("reduce.json"), "reduce");
    let m = &s["models"][0];
    assert!(m["error_bound"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn mtlbt_stable_on_synthetic_suite() {
    for (kind, extra) in [
        ("weakly_damped", vec!["--n", "40", "--te", "5"]),
        ("heat_like", vec!["--n", "60", "--te", "0.05"]),
        ("random_stable", vec!["--n", "30", "--te", "1"]),
    ] {
        let d = tempfile::tempdir().unwrap();
        let mut args = vec!["reduce", "--synth", kind, "--mode", "mtlbt", "--order", "3", "--m", "2", "--p", "2"];
        args.extend(extra);
        ok(&tlbt(&args, Some(d.path())));
        let s = checked(&d.path().join("reduce.json"), "reduce");
        assert_eq!(s["models"][0]["stable"], 1, "{kind}");
    }
}

#[test]
fn simulate_with_reduction() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--synth", "weakly_damped", "--n", "30", "--dt", "0.05", "--tf", "10", "--mode", "bt,tlbt",
        "--order", "6", "--te", "5",
    ];
    ok(&tlbt(&args, Some(d.path())));
    let s = checked(&d.path().join("simulate.json"), "simulate");
    assert_eq!(s["runs"].as_array().unwrap().len(), 2);
    assert!(s["t_half"].as_f64().unwrap() > 0.0);
    let y = std::fs::read_to_string(d.path().join("y_full.csv")).unwrap();
    assert!(y.starts_with("t,y1,norm\n"));
    assert_eq!(y.lines().count(), 1 + 201);
    let e = std::fs::read_to_string(d.path().join("error_tlbt_r6.csv")).unwrap();
    assert!(e.starts_with("t,E\n"));
}

#[test]
fn simulate_input_file_matches_step() {
    let d = tempfile::tempdir().unwrap();
    let u = d.path().join("u.csv");
    std::fs::write(&u, "t,u1\n0,2\n100,2\n").unwrap();
    let base = ["simulate", "--synth", "heat_like", "--n", "20", "--dt", "0.01", "--tf", "0.5"];
    let a = d.path().join("a");
    let b = d.path().join("b");
    let mut fa = base.to_vec();
    fa.extend(["--input", "file", "--input-file", u.to_str().unwrap()]);
    ok(&tlbt(&fa, Some(&a)));
    let mut fb = base.to_vec();
    fb.extend(["--input", "step", "--amplitude", "2"]);
    ok(&tlbt(&fb, Some(&b)));
    assert_eq!(
        std::fs::read(a.join("y_full.csv")).unwrap(),
        std::fs::read(b.join("y_full.csv")).unwrap()
    );
    let s = checked(&a.join("simulate.json"), "simulate");
    assert_eq!(s["input"], "file");
    assert!(s["t_half"].is_null());
    let mut bad = base.to_vec();
    bad.extend(["--input", "file"]);
    assert_eq!(code(&tlbt(&bad, Some(&a))), 2);
}

#[test]
fn compare_outputs() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "compare", "--synth", "weakly_damped", "--n", "40", "--seed", "2", "--mode", "bt,tlbt", "--order", "4,8",
        "--te", "8", "--dt", "0.05", "--tf", "8",
    ];
    ok(&tlbt(&args, Some(d.path())));
    let s = checked(&d.path().join("compare.json"), "compare");
    assert_eq!(s["rows"].as_array().unwrap().len(), 4);
    checked(&d.path().join("timings.json"), "timings");
    let et = std::fs::read_to_string(d.path().join("et_vs_r.csv")).unwrap();
    assert!(et.starts_with("mode,r,E_T,s\nbt,4,"));
    let e = std::fs::read_to_string(d.path().join("errors_tlbt.csv")).unwrap();
    assert!(e.starts_with("t,E_r4,E_r8\n"));
    let compare = std::fs::read_to_string(d.path().join("compare.json")).unwrap();
    assert!(!compare.contains("seconds") && !compare.contains("t_mor"));
}

#[test]
fn hsv_command() {
    let d = tempfile::tempdir().unwrap();
    let args = ["hsv", "--synth", "random_stable", "--n", "15", "--mode", "bt,tlbt,mtlbt", "--te", "0.5"];
    ok(&tlbt(&args, Some(d.path())));
    let s = checked(&d.path().join("hsv.json"), "hsv");
    let modes = s["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 3);
    let v: Vec<f64> = modes[0]["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(v.windows(2).all(|w| w[0] >= w[1]));
    let csv = std::fs::read_to_string(d.path().join("hsv.csv")).unwrap();
    assert!(csv.starts_with("mode,index,sigma\nbt,1,"));
}

#[test]
fn synth_round_trip_through_sidecar() {
    let d = tempfile::tempdir().unwrap();
    let sys_dir = d.path().join("sys");
    let o = tlbt(
        &["synth", "--kind", "heat_like", "--n", "30", "--m", "2", "--p", "2", "--seed", "3", "--name", "heat"],
        Some(&sys_dir),
    );
    ok(&o);
    let sidecar = sys_dir.join("heat.json");
    checked(&sidecar, "sidecar");
    let via_file = d.path().join("f");
    let via_synth = d.path().join("s");
    ok(&tlbt(&["gramian", "--system", sidecar.to_str().unwrap(), "--mode", "bt"], Some(&via_file)));
    ok(&tlbt(
        &["gramian", "--synth", "heat_like", "--n", "30", "--m", "2", "--p", "2", "--seed", "3", "--mode", "bt"],
        Some(&via_synth),
    ));
    for f in ["bt/Z_P.mtx", "bt/Z_Q.mtx", "bt/trace_P.csv"] {
        assert_eq!(std::fs::read(via_file.join(f)).unwrap(), std::fs::read(via_synth.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn preset_applies_shift() {
    let d = tempfile::tempdir().unwrap();
    let sys_dir = d.path().join("sys");
    ok(&tlbt(&["synth", "--kind", "scalar"], Some(&sys_dir)));
    let sidecar = sys_dir.join("scalar.json");
    let s = sidecar.to_str().unwrap();
    let out = d.path().join("g");
    ok(&tlbt(&["gramian", "--system", s, "--mode", "bt", "--preset", "bips"], Some(&out)));
    // a = -1.08  =>  P = 1 / 2.16
    assert!((factor_value(&out.join("bt/Z_P.mtx")) - (1.0f64 / 2.16).sqrt()).abs() < 1e-12);
    ok(&tlbt(&["gramian", "--system", s, "--mode", "bt", "--shift", "-0.5"], Some(&out)));
    assert!((factor_value(&out.join("bt/Z_P.mtx")) - 1.0).abs() < 1e-12);
}
