//! Implementation of the `tlbt` subcommands.

use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use tlbt_core::gramians::{
    gramian_infinite_dense, gramian_modified_dense, gramian_timelimited_dense, psd_factor, solve_gramian,
    GramianKind, SolverConfig, TimeWindow, TraceRow,
};
use tlbt_core::model::{alpha_shift, LtiSystem};
use tlbt_core::reduction::{
    gramian_factors, hankel_sv, square_root_reduce, GramianMethod, Mode, OrderSelection, ReducedModel,
    ReductionStats,
};
use tlbt_core::simulate::{half_decay_time, implicit_midpoint, impulse_response, relative_error_series, InputSignal, Trajectory};
use tlbt_core::{synth, Mat};

use crate::cli::{
    Cli, Command, CompareArgs, GramianArgs, HsvArgs, InputKind, Preset, ReduceArgs, SimArgs, SimulateArgs,
    SolverArgs, SynthArgs, SynthChoice, SystemArgs,
};
use crate::error::CliError;
use crate::mm;
use crate::output::{atomic_write, csv_string, csv_string_raw, fmt_f64, write_json};
use crate::sidecar;

/// Parse `args` (including the program name) and run the command.
pub fn run_from<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::config(e.to_string()))?;
    run(cli)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gramian(a) => gramian(&a),
        Command::Reduce(a) => reduce(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Compare(a) => compare(&a),
        Command::Hsv(a) => hsv(&a),
        Command::Synth(a) => synth_cmd(&a),
    }
}

struct Source {
    name: String,
    sys: LtiSystem,
    eliminated: bool,
}

#[derive(Serialize)]
struct SystemJson {
    name: String,
    n: usize,
    m: usize,
    p: usize,
    generalized: bool,
    /// Algebraic states were eliminated on load; `D` carries their contribution.
    eliminated: bool,
}

#[derive(Clone, Copy, Serialize)]
struct WindowJson {
    t_s: f64,
    t_e: f64,
}

fn window_json(w: Option<TimeWindow>) -> Option<WindowJson> {
    w.map(|w| WindowJson { t_s: w.t_s, t_e: w.t_e })
}

impl Source {
    fn json(&self) -> SystemJson {
        SystemJson {
            name: self.name.clone(),
            n: self.sys.order(),
            m: self.sys.inputs(),
            p: self.sys.outputs(),
            generalized: self.sys.mass().is_some(),
            eliminated: self.eliminated,
        }
    }
}

fn build_synth(kind: SynthChoice, n: usize, m: usize, p: usize, seed: u64, damping: f64) -> Result<LtiSystem, CliError> {
    Ok(match kind {
        SynthChoice::WeaklyDamped => synth::weakly_damped(n, m, p, seed, damping)?,
        SynthChoice::HeatLike => synth::heat_like(n, m, p, seed)?,
        SynthChoice::RandomStable => synth::random_stable(n, m, p, seed)?,
        SynthChoice::Scalar => synth::scalar(),
    })
}

fn synth_name(kind: SynthChoice) -> &'static str {
    match kind {
        SynthChoice::WeaklyDamped => "weakly_damped",
        SynthChoice::HeatLike => "heat_like",
        SynthChoice::RandomStable => "random_stable",
        SynthChoice::Scalar => "scalar",
    }
}

fn load_source(a: &SystemArgs) -> Result<Source, CliError> {
    let (name, sys, eliminated, own_shift) = match (&a.system, a.synth) {
        (Some(path), _) => {
            if !path.is_file() {
                return Err(CliError::config(format!("no such file: {}", path.display())));
            }
            let l = sidecar::load(path)?;
            let own = l.sidecar.alpha_shift.is_some();
            (l.name, l.system, l.eliminated, own)
        }
        (None, Some(k)) => (
            synth_name(k).to_string(),
            build_synth(k, a.n, a.m, a.p, a.seed, a.damping)?,
            false,
            false,
        ),
        (None, None) => return Err(CliError::config("give --system <sidecar.json> or --synth <kind>")),
    };
    let shift = a.shift.or_else(|| if own_shift { None } else { a.preset.and_then(|p| p.shift()) });
    let sys = match shift {
        Some(s) => alpha_shift(&sys, s)?,
        None => sys,
    };
    Ok(Source { name, sys, eliminated })
}

fn method(s: &SolverArgs) -> GramianMethod {
    if s.dense {
        GramianMethod::Dense
    } else {
        GramianMethod::Krylov
    }
}

fn kind_name(k: &GramianKind) -> &'static str {
    match k {
        GramianKind::Infinite => "infinite",
        GramianKind::TimeLimited(_) => "time_limited",
        GramianKind::Modified(_) => "modified",
    }
}

fn kind_for(mode: Mode, w: Option<TimeWindow>) -> Result<GramianKind, CliError> {
    mode.gramian_kind(w)
        .map_err(|_| CliError::config(format!("mode {} needs a time window (--te)", mode.name())))
}

fn write_mm(path: &Path, a: &Mat) -> Result<(), CliError> {
    mm::write_array(path, a).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, s: &str) -> Result<(), CliError> {
    atomic_write(path, s.as_bytes()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json_file<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    write_json(path, v).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------- gramian

struct Solved {
    z: Mat,
    d: Option<usize>,
    mu: Option<f64>,
    seconds: f64,
    trace: Vec<TraceRow>,
}

fn solve_one(sys: &LtiSystem, kind: GramianKind, cfg: &SolverConfig, dense: bool) -> Result<Solved, CliError> {
    let clock = Instant::now();
    if dense {
        if sys.order() > cfg.dense_threshold {
            return Err(CliError::config(format!(
                "order {} exceeds the dense threshold {}",
                sys.order(),
                cfg.dense_threshold
            )));
        }
        let p = match kind {
            GramianKind::Infinite => gramian_infinite_dense(sys)?,
            GramianKind::TimeLimited(w) => gramian_timelimited_dense(sys, w)?,
            GramianKind::Modified(w) => gramian_modified_dense(sys, w)?,
        };
        let z = psd_factor(&p, 1e-15)?;
        return Ok(Solved {
            z,
            d: None,
            mu: None,
            seconds: clock.elapsed().as_secs_f64(),
            trace: Vec::new(),
        });
    }
    let g = solve_gramian(sys, kind, cfg)?;
    Ok(Solved {
        seconds: g.wall_time.unwrap_or_else(|| clock.elapsed().as_secs_f64()),
        z: g.z,
        d: Some(g.dim),
        mu: Some(g.mu),
        trace: g.trace,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn trace_csv(rows: &[TraceRow]) -> String {
    csv_string_raw(
        &["iteration", "shift_re", "shift_im", "dim", "f_change", "mu"],
        rows.iter().map(|r| {
            let (re, im) = match r.shift {
                Some(s) => (fmt_f64(s.re), fmt_f64(s.im)),
                None => ("inf".to_string(), fmt_f64(0.0)),
            };
            vec![r.iteration.to_string(), re, im, r.dim.to_string(), opt(r.f_change), opt(r.mu)]
        }),
    )
}

#[derive(Serialize)]
struct GramianEntry {
    mode: &'static str,
    gramian: &'static str,
    kind: &'static str,
    /// Subspace dimension (Krylov only).
    d: Option<usize>,
    /// Columns of the factor.
    rank: usize,
    mu: Option<f64>,
    seconds: f64,
    factor: String,
    trace: Option<String>,
}

#[derive(Serialize)]
struct GramianSummary {
    system: SystemJson,
    method: &'static str,
    window: Option<WindowJson>,
    tol_f: f64,
    tol_p: f64,
    cadence: usize,
    gramians: Vec<GramianEntry>,
}

fn gramian(a: &GramianArgs) -> Result<(), CliError> {
    let modes = a.modes.modes()?;
    let w = a.window.window()?;
    let cfg = a.solver.config()?;
    let src = load_source(&a.system)?;
    let dual = src.sys.dual()?;
    let mut entries = Vec::new();
    for mode in modes {
        let kind = kind_for(mode, w)?;
        for (tag, sys) in [("P", &src.sys), ("Q", &dual)] {
            let s = solve_one(sys, kind, &cfg, a.solver.dense)?;
            let factor = format!("{}/Z_{tag}.mtx", mode.name());
            write_mm(&a.out.join(&factor), &s.z)?;
            let trace = if s.trace.is_empty() {
                None
            } else {
                let f = format!("{}/trace_{tag}.csv", mode.name());
                write_text(&a.out.join(&f), &trace_csv(&s.trace))?;
                Some(f)
            };
            println!(
                "{} {tag}: rank {} d {} mu {} ({:.3} s)",
                mode.name(),
                s.z.ncols(),
                s.d.map_or("-".into(), |d| d.to_string()),
                s.mu.map_or("-".into(), fmt_f64),
                s.seconds
            );
            entries.push(GramianEntry {
                mode: mode.name(),
                gramian: tag,
                kind: kind_name(&kind),
                d: s.d,
                rank: s.z.ncols(),
                mu: s.mu,
                seconds: s.seconds,
                factor,
                trace,
            });
        }
    }
    write_json_file(
        &a.out.join("gramian.json"),
        &GramianSummary {
            system: src.json(),
            method: if a.solver.dense { "dense" } else { "krylov" },
            window: window_json(w),
            tol_f: cfg.tol_f,
            tol_p: cfg.tol_p,
            cadence: cfg.cadence,
            gramians: entries,
        },
    )
}

// ---------------------------------------------------------------- reduction helpers

struct Factors {
    zp: Mat,
    zq: Mat,
    stats: ReductionStats,
    window: Option<TimeWindow>,
}

fn factors(src: &Source, mode: Mode, w: Option<TimeWindow>, cfg: &SolverConfig, m: GramianMethod) -> Result<Factors, CliError> {
    let kind = kind_for(mode, w)?;
    let mut stats = ReductionStats::default();
    let clock = Instant::now();
    let (zp, zq) = gramian_factors(&src.sys, kind, m, cfg, &mut stats)?;
    if stats.gramian_time.is_none() {
        stats.gramian_time = Some(clock.elapsed().as_secs_f64());
    }
    Ok(Factors {
        zp,
        zq,
        stats,
        window: kind.window(),
    })
}

fn reduce_from(src: &Source, f: &Factors, mode: Mode, order: OrderSelection) -> Result<ReducedModel, CliError> {
    let clock = Instant::now();
    let mut rm = square_root_reduce(&f.zp, &f.zq, &src.sys, order)?;
    rm.mode = mode;
    rm.window = f.window;
    rm.stats = f.stats.clone();
    rm.stats.reduction_time = Some(clock.elapsed().as_secs_f64());
    Ok(rm)
}

fn orders(order: &[usize], tol: Option<f64>) -> Result<Vec<OrderSelection>, CliError> {
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(CliError::config("--tol must be positive"));
        }
        return Ok(vec![OrderSelection::Tolerance(t)]);
    }
    if order.is_empty() {
        return Err(CliError::config("give --order r[,r...] or --tol"));
    }
    if order.contains(&0) {
        return Err(CliError::config("reduced orders must be positive"));
    }
    Ok(order.iter().map(|&r| OrderSelection::Fixed(r)).collect())
}

#[derive(Serialize)]
struct ReducedJson {
    mode: &'static str,
    window: Option<WindowJson>,
    r: usize,
    n: usize,
    /// 1 if every reduced eigenvalue has negative real part.
    stable: u8,
    hsv: Vec<f64>,
    hsv_all: Vec<f64>,
    error_bound: f64,
    tie_warning: bool,
    mu_p: Option<f64>,
    mu_q: Option<f64>,
    dim_p: Option<usize>,
    dim_q: Option<usize>,
    rank_p: usize,
    rank_q: usize,
    t_mor: Option<f64>,
    /// Filled in by `simulate` and `compare`.
    #[serde(rename = "E_T")]
    e_t: Option<f64>,
    /// The reduced model keeps the full model's `D`.
    feedthrough: bool,
    dir: String,
}

fn reduced_json(rm: &ReducedModel, n: usize, dir: String) -> ReducedJson {
    ReducedJson {
        mode: rm.mode.name(),
        window: window_json(rm.window),
        r: rm.order(),
        n,
        stable: rm.stable as u8,
        hsv: rm.hsv.clone(),
        hsv_all: rm.hsv_all.clone(),
        error_bound: rm.error_bound(),
        tie_warning: rm.tie_warning,
        mu_p: rm.stats.mu_p,
        mu_q: rm.stats.mu_q,
        dim_p: rm.stats.dim_p,
        dim_q: rm.stats.dim_q,
        rank_p: rm.stats.rank_p,
        rank_q: rm.stats.rank_q,
        t_mor: rm.stats.t_mor(),
        e_t: None,
        feedthrough: rm.d.max_abs() > 0.0,
        dir,
    }
}

#[derive(Serialize)]
struct ReduceSummary {
    system: SystemJson,
    models: Vec<ReducedJson>,
}

fn reduce(a: &ReduceArgs) -> Result<(), CliError> {
    let modes = a.modes.modes()?;
    let w = a.window.window()?;
    let cfg = a.solver.config()?;
    let sel = orders(&a.order, a.tol)?;
    let src = load_source(&a.system)?;
    let mut models = Vec::new();
    for mode in modes {
        let f = factors(&src, mode, w, &cfg, method(&a.solver))?;
        for &o in &sel {
            let rm = reduce_from(&src, &f, mode, o)?;
            if rm.tie_warning {
                eprintln!("warning: {} r={}: sigma_r and sigma_(r+1) coincide", mode.name(), rm.order());
            }
            let dir = format!("{}_r{}", mode.name(), rm.order());
            let d = a.out.join(&dir);
            for (name, m) in [("A", &rm.a), ("B", &rm.b), ("C", &rm.c), ("D", &rm.d), ("T", &rm.t), ("S", &rm.s)] {
                write_mm(&d.join(format!("{name}.mtx")), m)?;
            }
            let j = reduced_json(&rm, src.sys.order(), dir);
            write_json_file(&d.join("model.json"), &j)?;
            println!(
                "{} r={} stable={} bound={} t_mor={:.3} s",
                j.mode,
                j.r,
                j.stable,
                fmt_f64(j.error_bound),
                j.t_mor.unwrap_or(f64::NAN)
            );
            models.push(j);
        }
    }
    write_json_file(
        &a.out.join("reduce.json"),
        &ReduceSummary {
            system: src.json(),
            models,
        },
    )
}

// ---------------------------------------------------------------- simulation helpers

enum Excitation {
    Impulse,
    Signal(InputSignal),
}

struct SimSetup {
    kind: InputKind,
    dt: f64,
    t_f: f64,
    exc: Excitation,
}

fn read_input_file(path: &Path, m: usize) -> Result<InputSignal, CliError> {
    let bad = |msg: String| CliError::config(format!("{}: {msg}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let mut t = Vec::new();
    let mut u: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != m + 1 {
            return Err(bad(format!("expected {} columns (t and {m} inputs)", m + 1)));
        }
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("bad number {s:?}"))))
            .collect::<Result<_, _>>()?;
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite sample".into()));
        }
        if t.last().is_some_and(|&l| vals[0] <= l) {
            return Err(bad("times must increase strictly".into()));
        }
        t.push(vals[0]);
        u.push(vals[1..].to_vec());
    }
    if t.is_empty() {
        return Err(bad("no samples".into()));
    }
    Ok(InputSignal::Custom(Box::new(move |s| interpolate(&t, &u, s))))
}

/// Piecewise linear, constant beyond the sampled range.
fn interpolate(t: &[f64], u: &[Vec<f64>], s: f64) -> Vec<f64> {
    let k = t.partition_point(|&x| x <= s);
    if k == 0 {
        return u[0].clone();
    }
    if k == t.len() {
        return u[k - 1].clone();
    }
    let th = (s - t[k - 1]) / (t[k] - t[k - 1]);
    u[k - 1].iter().zip(&u[k]).map(|(a, b)| a + th * (b - a)).collect()
}

fn ustar(t: f64) -> Vec<f64> {
    let s = (t * std::f64::consts::PI / 100.0).sin();
    vec![5e4 * 0.198 * s * s, 4.0, 2.0, 1.0, 3.0, 1.0]
}

fn sim_setup(sim: &SimArgs, preset: Option<Preset>, m: usize) -> Result<SimSetup, CliError> {
    let dt = sim
        .dt
        .or(preset.map(|p| p.dt()))
        .ok_or_else(|| CliError::config("--dt is required"))?;
    let t_f = sim
        .tf
        .or(preset.map(|p| p.t_f()))
        .ok_or_else(|| CliError::config("--tf is required"))?;
    if !(dt > 0.0 && dt.is_finite()) || !(t_f >= dt && t_f.is_finite()) {
        return Err(CliError::config("need 0 < dt <= tf"));
    }
    let (pk, pamp) = preset.map(|p| p.input()).unwrap_or((InputKind::Impulse, 1.0));
    let kind = sim.input.unwrap_or(pk);
    let exc = match kind {
        InputKind::Impulse => Excitation::Impulse,
        InputKind::Step => Excitation::Signal(InputSignal::step(m, sim.amplitude.unwrap_or(pamp))),
        InputKind::File => {
            let p = sim
                .input_file
                .as_ref()
                .ok_or_else(|| CliError::config("--input file needs --input-file <csv>"))?;
            Excitation::Signal(read_input_file(p, m)?)
        }
        InputKind::Ustar => {
            if m != 6 {
                return Err(CliError::config("--input ustar needs a system with 6 inputs"));
            }
            Excitation::Signal(InputSignal::Custom(Box::new(ustar)))
        }
    };
    Ok(SimSetup { kind, dt, t_f, exc })
}

fn run_sim(sys: &LtiSystem, s: &SimSetup) -> Result<Trajectory, CliError> {
    Ok(match &s.exc {
        Excitation::Impulse => impulse_response(sys, None, s.dt, s.t_f)?,
        Excitation::Signal(u) => implicit_midpoint(sys, u, &vec![0.0; sys.order()], s.dt, s.t_f)?,
    })
}

fn trajectory_csv(tr: &Trajectory) -> String {
    let p = tr.outputs.ncols();
    let mut header = vec!["t".to_string()];
    header.extend((1..=p).map(|j| format!("y{j}")));
    header.push("norm".into());
    let norms = tr.output_norms();
    csv_string(
        &header,
        (0..tr.len()).map(|k| {
            let mut row = vec![tr.times[k]];
            row.extend((0..p).map(|j| tr.outputs[(k, j)]));
            row.push(norms[k]);
            row
        }),
    )
}

fn error_window(w: Option<TimeWindow>, t_f: f64) -> Option<(f64, f64)> {
    w.map(|w| {
        if w.t_e > t_f {
            eprintln!("warning: t_e = {} lies beyond t_f = {t_f}; errors are measured up to t_f", w.t_e);
        }
        (w.t_s, w.t_e)
    })
}

// ---------------------------------------------------------------- simulate

#[derive(Serialize)]
struct RunJson {
    mode: &'static str,
    r: usize,
    window: Option<WindowJson>,
    #[serde(rename = "E_T")]
    e_t: f64,
    stable: u8,
    trajectory: String,
    error: String,
}

#[derive(Serialize)]
struct SimulateSummary {
    system: SystemJson,
    input: &'static str,
    dt: f64,
    t_f: f64,
    /// First time after which `||y||` stays below half its peak (impulse input only).
    t_half: Option<f64>,
    trajectory: String,
    runs: Vec<RunJson>,
}

fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let src = load_source(&a.system)?;
    let setup = sim_setup(&a.sim, a.system.preset, src.sys.inputs())?;
    let w = a.window.window()?;
    let full = run_sim(&src.sys, &setup)?;
    write_text(&a.out.join("y_full.csv"), &trajectory_csv(&full))?;
    let t_half = match setup.exc {
        Excitation::Impulse => half_decay_time(&full),
        _ => None,
    };
    let mut runs = Vec::new();
    if !a.modes.mode.is_empty() {
        let modes = a.modes.modes()?;
        let cfg = a.solver.config()?;
        let sel = orders(&a.order, None)?;
        for mode in modes {
            let f = factors(&src, mode, w, &cfg, method(&a.solver))?;
            for &o in &sel {
                let rm = reduce_from(&src, &f, mode, o)?;
                let yr = run_sim(&rm.to_system()?, &setup)?;
                let es = relative_error_series(&full, &yr, error_window(w, setup.t_f))?;
                let tag = format!("{}_r{}", mode.name(), rm.order());
                let traj = format!("y_{tag}.csv");
                let err = format!("error_{tag}.csv");
                write_text(&a.out.join(&traj), &trajectory_csv(&yr))?;
                write_text(
                    &a.out.join(&err),
                    &csv_string(
                        &["t".into(), "E".into()],
                        es.times.iter().zip(&es.e).map(|(t, e)| vec![*t, *e]),
                    ),
                )?;
                println!("{tag}: E_T = {}", fmt_f64(es.e_max));
                runs.push(RunJson {
                    mode: mode.name(),
                    r: rm.order(),
                    window: window_json(w),
                    e_t: es.e_max,
                    stable: rm.stable as u8,
                    trajectory: traj,
                    error: err,
                });
            }
        }
    } else if !a.order.is_empty() {
        return Err(CliError::config("--order needs --mode"));
    }
    write_json_file(
        &a.out.join("simulate.json"),
        &SimulateSummary {
            system: src.json(),
            input: setup.kind.name(),
            dt: setup.dt,
            t_f: setup.t_f,
            t_half,
            trajectory: "y_full.csv".into(),
            runs,
        },
    )
}

// ---------------------------------------------------------------- compare

#[derive(Serialize)]
struct CompareRow {
    mode: &'static str,
    r: usize,
    #[serde(rename = "E_T")]
    e_t: f64,
    /// 1 if the reduced model is asymptotically stable.
    s: u8,
    error_bound: f64,
    mu_p: Option<f64>,
    mu_q: Option<f64>,
    dim_p: Option<usize>,
    dim_q: Option<usize>,
    rank_p: usize,
    rank_q: usize,
}

#[derive(Serialize)]
struct CompareSummary {
    system: SystemJson,
    input: &'static str,
    dt: f64,
    t_f: f64,
    window: Option<WindowJson>,
    modes: Vec<&'static str>,
    orders: Vec<usize>,
    rows: Vec<CompareRow>,
}

#[derive(Serialize)]
struct TimingRow {
    mode: &'static str,
    r: usize,
    gramian_seconds: Option<f64>,
    reduction_seconds: Option<f64>,
    t_mor: Option<f64>,
}

fn compare(a: &CompareArgs) -> Result<(), CliError> {
    let modes = a.modes.modes()?;
    let w = a.window.window()?;
    let cfg = a.solver.config()?;
    if a.order.is_empty() {
        return Err(CliError::config("give --order r[,r...]"));
    }
    let sel = orders(&a.order, None)?;
    let src = load_source(&a.system)?;
    let setup = sim_setup(&a.sim, a.system.preset, src.sys.inputs())?;
    let full = run_sim(&src.sys, &setup)?;
    let ew = error_window(w, setup.t_f);
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for &mode in &modes {
        let f = factors(&src, mode, w, &cfg, method(&a.solver))?;
        let mut columns: Vec<Vec<f64>> = Vec::new();
        let mut header = vec!["t".to_string()];
        for &o in &sel {
            let rm = reduce_from(&src, &f, mode, o)?;
            let yr = run_sim(&rm.to_system()?, &setup)?;
            let es = relative_error_series(&full, &yr, ew)?;
            println!("{} r={}: E_T = {} s = {}", mode.name(), rm.order(), fmt_f64(es.e_max), rm.stable as u8);
            header.push(format!("E_r{}", rm.order()));
            columns.push(es.e);
            rows.push(CompareRow {
                mode: mode.name(),
                r: rm.order(),
                e_t: es.e_max,
                s: rm.stable as u8,
                error_bound: rm.error_bound(),
                mu_p: rm.stats.mu_p,
                mu_q: rm.stats.mu_q,
                dim_p: rm.stats.dim_p,
                dim_q: rm.stats.dim_q,
                rank_p: rm.stats.rank_p,
                rank_q: rm.stats.rank_q,
            });
            timings.push(TimingRow {
                mode: mode.name(),
                r: rm.order(),
                gramian_seconds: rm.stats.gramian_time,
                reduction_seconds: rm.stats.reduction_time,
                t_mor: rm.stats.t_mor(),
            });
        }
        let csv = csv_string(
            &header,
            (0..full.len()).map(|k| {
                let mut row = vec![full.times[k]];
                row.extend(columns.iter().map(|c| c[k]));
                row
            }),
        );
        write_text(&a.out.join(format!("errors_{}.csv", mode.name())), &csv)?;
    }
    let et = csv_string_raw(
        &["mode", "r", "E_T", "s"],
        rows.iter()
            .map(|r| vec![r.mode.to_string(), r.r.to_string(), fmt_f64(r.e_t), r.s.to_string()]),
    );
    write_text(&a.out.join("et_vs_r.csv"), &et)?;
    write_json_file(
        &a.out.join("compare.json"),
        &CompareSummary {
            system: src.json(),
            input: setup.kind.name(),
            dt: setup.dt,
            t_f: setup.t_f,
            window: window_json(w),
            modes: modes.iter().map(|m| m.name()).collect(),
            orders: a.order.clone(),
            rows,
        },
    )?;
    write_json_file(&a.out.join("timings.json"), &timings)
}

// ---------------------------------------------------------------- hsv

#[derive(Serialize)]
struct HsvEntry {
    mode: &'static str,
    kind: &'static str,
    values: Vec<f64>,
    rank_p: usize,
    rank_q: usize,
    mu_p: Option<f64>,
    mu_q: Option<f64>,
}

#[derive(Serialize)]
struct HsvSummary {
    system: SystemJson,
    window: Option<WindowJson>,
    modes: Vec<HsvEntry>,
}

fn hsv(a: &HsvArgs) -> Result<(), CliError> {
    let modes = a.modes.modes()?;
    let w = a.window.window()?;
    let cfg = a.solver.config()?;
    let src = load_source(&a.system)?;
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    for mode in modes {
        let kind = kind_for(mode, w)?;
        let f = factors(&src, mode, w, &cfg, method(&a.solver))?;
        let rep = hankel_sv(&f.zp, &f.zq, &src.sys, kind)?;
        for (i, v) in rep.values.iter().enumerate() {
            lines.push(vec![mode.name().to_string(), (i + 1).to_string(), fmt_f64(*v)]);
        }
        println!(
            "{}: {} values, sigma_1 = {}",
            mode.name(),
            rep.values.len(),
            rep.values.first().map_or("-".into(), |v| fmt_f64(*v))
        );
        entries.push(HsvEntry {
            mode: mode.name(),
            kind: kind_name(&kind),
            values: rep.values,
            rank_p: f.stats.rank_p,
            rank_q: f.stats.rank_q,
            mu_p: f.stats.mu_p,
            mu_q: f.stats.mu_q,
        });
    }
    write_text(&a.out.join("hsv.csv"), &csv_string_raw(&["mode", "index", "sigma"], lines))?;
    write_json_file(
        &a.out.join("hsv.json"),
        &HsvSummary {
            system: src.json(),
            window: window_json(w),
            modes: entries,
        },
    )
}

// ---------------------------------------------------------------- synth

fn synth_cmd(a: &SynthArgs) -> Result<(), CliError> {
    let sys = build_synth(a.kind, a.n, a.m, a.p, a.seed, a.damping)?;
    let name = a.name.clone().unwrap_or_else(|| synth_name(a.kind).to_string());
    let path = sidecar::save(&a.out, &name, &sys)?;
    println!("{}", path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation() {
        let t = [0.0, 1.0, 3.0];
        let u = [vec![0.0], vec![2.0], vec![0.0]];
        assert_eq!(interpolate(&t, &u, -1.0), vec![0.0]);
        assert_eq!(interpolate(&t, &u, 0.5), vec![1.0]);
        assert_eq!(interpolate(&t, &u, 2.0), vec![1.0]);
        assert_eq!(interpolate(&t, &u, 9.0), vec![0.0]);
    }

    #[test]
    fn ustar_shape() {
        let u = ustar(50.0);
        assert_eq!(u.len(), 6);
        assert!((u[0] - 5e4 * 0.198).abs() < 1e-9);
    }
}
