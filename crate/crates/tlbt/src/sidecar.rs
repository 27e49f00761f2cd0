//! JSON sidecar describing a system stored as a set of Matrix Market files.
//!
//! ```json
//! {
//!   "name": "rail_1357",
//!   "a": "A.mtx", "b": "B.mtx", "c": "C.mtx",
//!   "m": "M.mtx",
//!   "spd": true,
//!   "n_f": null,
//!   "alpha_shift": null
//! }
//! ```
//!
//! Paths are relative to the sidecar. `m` makes the system generalized,
//! `n_f` additionally marks it as an index-1 descriptor system whose first
//! `n_f` states are differential; the algebraic part is eliminated on load.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tlbt_core::model::{
    alpha_shift, eliminate_descriptor, DescriptorIndex1, GeneralizedSystem, LtiSystem, Operator, StandardSystem,
};
use tlbt_core::Mat;

use crate::mm::{self, MmError, MmMatrix};
use crate::output::write_json;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    #[serde(default)]
    pub name: Option<String>,
    pub a: String,
    pub b: String,
    pub c: String,
    #[serde(default)]
    pub m: Option<String>,
    #[serde(default)]
    pub d: Option<String>,
    /// `M` (or `M1` for descriptor systems) is symmetric positive definite.
    #[serde(default)]
    pub spd: bool,
    #[serde(default)]
    pub n_f: Option<usize>,
    /// Replace `A` by `A - alpha M` after loading.
    #[serde(default)]
    pub alpha_shift: Option<f64>,
    #[serde(default)]
    pub input_names: Option<Vec<String>>,
    #[serde(default)]
    pub output_names: Option<Vec<String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum SidecarError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{file}: {source}")]
    Matrix { file: String, source: MmError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] tlbt_core::Error),
}

pub struct LoadedSystem {
    pub name: String,
    pub system: LtiSystem,
    pub sidecar: Sidecar,
    /// The feed-through comes from eliminating algebraic states.
    pub eliminated: bool,
}

pub fn load(path: &Path) -> Result<LoadedSystem, SidecarError> {
    let text = std::fs::read_to_string(path).map_err(|e| SidecarError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let sc: Sidecar = serde_json::from_str(&text).map_err(|e| SidecarError::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = sc.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "system".into())
    });
    let (system, eliminated) = build(&sc, &base)?;
    let system = match sc.alpha_shift {
        Some(a) => alpha_shift(&system, a)?,
        None => system,
    };
    if let Some(names) = &sc.input_names {
        if names.len() != system.inputs() {
            return Err(SidecarError::Invalid("input_names length differs from the number of inputs".into()));
        }
    }
    if let Some(names) = &sc.output_names {
        if names.len() != system.outputs() {
            return Err(SidecarError::Invalid("output_names length differs from the number of outputs".into()));
        }
    }
    Ok(LoadedSystem {
        name,
        system,
        sidecar: sc,
        eliminated,
    })
}

fn read(base: &Path, file: &str) -> Result<MmMatrix, SidecarError> {
    let p = base.join(file);
    mm::read_file(&p).map_err(|e| SidecarError::Matrix {
        file: p.display().to_string(),
        source: e,
    })
}

fn operator(m: MmMatrix) -> Operator {
    match m {
        MmMatrix::Sparse(s) => Operator::Sparse(s),
        MmMatrix::Dense(d) => Operator::Dense(d),
    }
}

fn build(sc: &Sidecar, base: &Path) -> Result<(LtiSystem, bool), SidecarError> {
    let a = read(base, &sc.a)?;
    let b = read(base, &sc.b)?.into_dense();
    let c = read(base, &sc.c)?.into_dense();
    let d = sc.d.as_deref().map(|f| read(base, f)).transpose()?.map(MmMatrix::into_dense);
    match (&sc.m, sc.n_f) {
        (None, None) => Ok((StandardSystem::new(operator(a), b, c, d)?.into(), false)),
        (Some(m), None) => {
            let m = read(base, m)?;
            Ok((GeneralizedSystem::new(operator(m), operator(a), b, c, d, sc.spd)?.into(), false))
        }
        (Some(m), Some(nf)) => {
            let m = read(base, m)?.into_sparse();
            let desc = DescriptorIndex1::from_full(nf, &m, &a.into_sparse(), &b, &c, sc.spd)?;
            let (g, elim_d) = eliminate_descriptor(&desc)?;
            let sys: LtiSystem = g.into();
            let sys = match d {
                Some(d) => {
                    if d.shape() != elim_d.shape() {
                        return Err(tlbt_core::Error::DimensionMismatch("feed-through").into());
                    }
                    sys.with_d(d.add(&elim_d))?
                }
                None => sys,
            };
            Ok((sys, true))
        }
        (None, Some(_)) => Err(SidecarError::Invalid("n_f requires a mass matrix m".into())),
    }
}

fn write_operator(path: &Path, op: &Operator) -> Result<(), SidecarError> {
    let io = |e| SidecarError::Io {
        path: path.display().to_string(),
        source: e,
    };
    match op {
        Operator::Sparse(s) => mm::write_coordinate(path, s).map_err(io),
        Operator::Dense(d) => mm::write_array(path, d).map_err(io),
        Operator::Schur(_) => Err(SidecarError::Invalid(
            "eliminated descriptor systems cannot be written back".into(),
        )),
    }
}

fn write_dense(path: &Path, m: &Mat) -> Result<(), SidecarError> {
    mm::write_array(path, m).map_err(|e| SidecarError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Write `<name>_A.mtx`, ... and `<name>.json` into `dir`; returns the sidecar path.
pub fn save(dir: &Path, name: &str, sys: &LtiSystem) -> Result<PathBuf, SidecarError> {
    let file = |tag: &str| format!("{name}_{tag}.mtx");
    let mut sc = Sidecar {
        name: Some(name.into()),
        a: file("A"),
        b: file("B"),
        c: file("C"),
        spd: sys.mass_spd(),
        ..Default::default()
    };
    write_operator(&dir.join(&sc.a), sys.a())?;
    if let Some(m) = sys.mass() {
        let f = file("M");
        write_operator(&dir.join(&f), m)?;
        sc.m = Some(f);
    }
    write_dense(&dir.join(&sc.b), sys.b())?;
    write_dense(&dir.join(&sc.c), sys.c())?;
    if sys.d().max_abs() > 0.0 {
        let f = file("D");
        write_dense(&dir.join(&f), sys.d())?;
        sc.d = Some(f);
    }
    let path = dir.join(format!("{name}.json"));
    write_json(&path, &sc).map_err(|e| SidecarError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(path)
}
