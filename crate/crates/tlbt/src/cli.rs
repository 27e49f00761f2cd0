//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tlbt_core::gramians::{SolverConfig, TimeWindow};
use tlbt_core::reduction::Mode;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "tlbt", version, about = "Time-limited balanced truncation of LTI systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Low-rank Gramian factors, solver traces and a summary.
    Gramian(GramianArgs),
    /// Reduced models for each mode and order.
    Reduce(ReduceArgs),
    /// Output trajectories of the full model and, optionally, reduced models.
    Simulate(SimulateArgs),
    /// Relative output errors of several modes over a list of orders.
    Compare(CompareArgs),
    /// Hankel or time-limited singular values.
    Hsv(HsvArgs),
    /// Write a synthetic benchmark system as Matrix Market files plus sidecar.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthChoice {
    #[value(name = "weakly_damped")]
    WeaklyDamped,
    #[value(name = "heat_like")]
    HeatLike,
    #[value(name = "random_stable")]
    RandomStable,
    /// `x' = -x + u, y = x`
    Scalar,
}

/// Parameters of the experiments in the reference study for externally supplied data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Index-1 power systems: `A - 0.08 M`, `t_f = 20`, `dt = 0.04`, step `1_m`.
    Bips,
    /// `t_f = 600`, `dt = 0.6`, input `u_*`.
    Vertstand,
    /// `t_f = 400`, `dt = 0.4`, step `50 * 1_m`.
    Rail,
}

impl Preset {
    pub fn shift(&self) -> Option<f64> {
        match self {
            Preset::Bips => Some(0.08),
            _ => None,
        }
    }

    pub fn t_f(&self) -> f64 {
        match self {
            Preset::Bips => 20.0,
            Preset::Vertstand => 600.0,
            Preset::Rail => 400.0,
        }
    }

    pub fn dt(&self) -> f64 {
        match self {
            Preset::Bips => 0.04,
            Preset::Vertstand => 0.6,
            Preset::Rail => 0.4,
        }
    }

    pub fn input(&self) -> (InputKind, f64) {
        match self {
            Preset::Bips => (InputKind::Step, 1.0),
            Preset::Vertstand => (InputKind::Ustar, 1.0),
            Preset::Rail => (InputKind::Step, 50.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    Impulse,
    Step,
    /// CSV `t,u1,...,um`, linearly interpolated.
    File,
    /// `[5e4 * 0.198 sin(pi t / 100)^2, 4, 2, 1, 3, 1]` (six inputs).
    Ustar,
}

impl InputKind {
    pub fn name(&self) -> &'static str {
        match self {
            InputKind::Impulse => "impulse",
            InputKind::Step => "step",
            InputKind::File => "file",
            InputKind::Ustar => "ustar",
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct SystemArgs {
    /// Sidecar JSON of a Matrix Market system.
    #[arg(long, conflicts_with = "synth")]
    pub system: Option<PathBuf>,
    /// Builtin synthetic system.
    #[arg(long, value_enum)]
    pub synth: Option<SynthChoice>,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Damping ratio of `weakly_damped`.
    #[arg(long, default_value_t = tlbt_core::synth::DEFAULT_ALPHA)]
    pub damping: f64,
    /// Use `A - shift * M` instead of `A`.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

#[derive(Clone, Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tol_f: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_p: f64,
    /// Iterations between convergence checks.
    #[arg(long, default_value_t = 5)]
    pub cadence: usize,
    #[arg(long, default_value_t = 600)]
    pub max_dim: usize,
    /// Dense Gramians instead of the rational Krylov solver.
    #[arg(long)]
    pub dense: bool,
    /// Largest order accepted by `--dense`.
    #[arg(long, env = "TLBT_DENSE_THRESHOLD")]
    pub dense_threshold: Option<usize>,
}

impl SolverArgs {
    pub fn config(&self) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig {
            tol_f: self.tol_f,
            tol_p: self.tol_p,
            cadence: self.cadence,
            max_dim: self.max_dim,
            ..SolverConfig::default()
        };
        if let Some(t) = self.dense_threshold {
            cfg.dense_threshold = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Args)]
pub struct WindowArgs {
    /// Start of the time window.
    #[arg(long, default_value_t = 0.0)]
    pub ts: f64,
    /// End of the time window; required by `tlbt` and `mtlbt`.
    #[arg(long)]
    pub te: Option<f64>,
}

impl WindowArgs {
    pub fn window(&self) -> Result<Option<TimeWindow>, CliError> {
        match self.te {
            Some(te) => Ok(Some(TimeWindow::new(self.ts, te)?)),
            None if self.ts != 0.0 => Err(CliError::config("--ts given without --te")),
            None => Ok(None),
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct ModeArgs {
    /// Comma-separated list of bt, tlbt, mtlbt.
    #[arg(long, value_delimiter = ',')]
    pub mode: Vec<String>,
}

impl ModeArgs {
    pub fn modes(&self) -> Result<Vec<Mode>, CliError> {
        let mut out = Vec::new();
        for s in self.mode.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
            let m = Mode::parse(s).ok_or_else(|| CliError::config(format!("unknown mode {s:?}")))?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(CliError::config("no mode given (--mode bt|tlbt|mtlbt)"));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long, value_enum)]
    pub input: Option<InputKind>,
    /// Input samples for `--input file`.
    #[arg(long)]
    pub input_file: Option<PathBuf>,
    /// Step height for `--input step`.
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GramianArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub modes: ModeArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub modes: ModeArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Comma-separated reduced orders.
    #[arg(long, value_delimiter = ',', conflicts_with = "tol")]
    pub order: Vec<usize>,
    /// Smallest order whose bound `2 * sum(sigma_tail)` is below this value.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Also reduce with these modes and report output errors.
    #[command(flatten)]
    pub modes: ModeArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_delimiter = ',')]
    pub order: Vec<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub modes: ModeArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_delimiter = ',')]
    pub order: Vec<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HsvArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub modes: ModeArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthChoice,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = tlbt_core::synth::DEFAULT_ALPHA)]
    pub damping: f64,
    /// File stem; defaults to the generator name.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}
