//! Matrix Market reader and writer (real `coordinate` and `array` formats).
//!
//! Values are written with 17 significant digits, so a write/read cycle
//! reproduces every `f64` bit for bit.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use tlbt_core::sparse::Csc;
use tlbt_core::Mat;

use crate::output::{atomic_write, fmt_f64};

#[derive(Debug, thiserror::Error)]
pub enum MmError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported Matrix Market header: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Core(#[from] tlbt_core::Error),
}

fn perr(line: usize, msg: impl Into<String>) -> MmError {
    MmError::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

/// Contents of a Matrix Market file.
#[derive(Clone, Debug, PartialEq)]
pub enum MmMatrix {
    Sparse(Csc),
    Dense(Mat),
}

impl MmMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MmMatrix::Sparse(s) => s.shape(),
            MmMatrix::Dense(d) => d.shape(),
        }
    }

    pub fn into_dense(self) -> Mat {
        match self {
            MmMatrix::Sparse(s) => s.to_dense(),
            MmMatrix::Dense(d) => d,
        }
    }

    pub fn into_sparse(self) -> Csc {
        match self {
            MmMatrix::Sparse(s) => s,
            MmMatrix::Dense(d) => Csc::from_dense(&d),
        }
    }
}

pub fn read_file(path: &Path) -> Result<MmMatrix, MmError> {
    let f = File::open(path).map_err(|e| MmError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read(BufReader::new(f))
}

pub fn parse_str(s: &str) -> Result<MmMatrix, MmError> {
    read(s.as_bytes())
}

pub fn read<R: Read>(r: R) -> Result<MmMatrix, MmError> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let io = |e| MmError::Io {
        path: "<stream>".into(),
        source: e,
    };
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let header = header.map_err(io)?;
    let h: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return Err(MmError::Unsupported(header));
    }
    let coordinate = match h[2].as_str() {
        "coordinate" => true,
        "array" => false,
        _ => return Err(MmError::Unsupported(header)),
    };
    let pattern = match h[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" if coordinate => true,
        _ => return Err(MmError::Unsupported(header)),
    };
    let sym = match h[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        _ => return Err(MmError::Unsupported(header)),
    };

    let mut body = Vec::new();
    for (k, line) in lines {
        let line = line.map_err(io)?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push((k + 1, line));
    }
    let mut it = body.iter();
    let (sl, size) = it.next().ok_or_else(|| perr(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(*sl, format!("bad size entry {t:?}"))))
        .collect::<Result<_, _>>()?;
    let num = |line: usize, t: &str| -> Result<f64, MmError> {
        t.parse::<f64>().map_err(|_| perr(line, format!("bad value {t:?}")))
    };

    if coordinate {
        let [nr, nc, nnz] = dims[..] else {
            return Err(perr(*sl, "coordinate size line needs rows cols nnz"));
        };
        let mut trip = Vec::with_capacity(if sym == Symmetry::General { nnz } else { 2 * nnz });
        let mut seen = 0;
        for (ln, line) in it {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let want = if pattern { 2 } else { 3 };
            if tok.len() != want {
                return Err(perr(*ln, format!("expected {want} fields")));
            }
            let i: usize = tok[0].parse().map_err(|_| perr(*ln, "bad row index"))?;
            let j: usize = tok[1].parse().map_err(|_| perr(*ln, "bad column index"))?;
            if i == 0 || j == 0 || i > nr || j > nc {
                return Err(perr(*ln, format!("index ({i}, {j}) out of range")));
            }
            let v = if pattern { 1.0 } else { num(*ln, tok[2])? };
            let (i, j) = (i - 1, j - 1);
            trip.push((i, j, v));
            if i != j {
                match sym {
                    Symmetry::General => {}
                    Symmetry::Symmetric => trip.push((j, i, v)),
                    Symmetry::Skew => trip.push((j, i, -v)),
                }
            }
            seen += 1;
        }
        if seen != nnz {
            return Err(perr(*sl, format!("header announces {nnz} entries, found {seen}")));
        }
        Ok(MmMatrix::Sparse(Csc::from_triplets(nr, nc, &trip)?))
    } else {
        let [nr, nc] = dims[..] else {
            return Err(perr(*sl, "array size line needs rows cols"));
        };
        if sym != Symmetry::General && nr != nc {
            return Err(perr(*sl, "symmetric array must be square"));
        }
        let mut vals = Vec::with_capacity(nr * nc);
        let mut last = *sl;
        for (ln, line) in it {
            for t in line.split_whitespace() {
                vals.push(num(*ln, t)?);
            }
            last = *ln;
        }
        let mut a = Mat::zeros(nr, nc);
        let mut k = 0;
        for j in 0..nc {
            let i0 = match sym {
                Symmetry::General => 0,
                Symmetry::Symmetric => j,
                Symmetry::Skew => j + 1,
            };
            for i in i0..nr {
                let v = *vals.get(k).ok_or_else(|| perr(last, "too few values"))?;
                k += 1;
                a[(i, j)] = v;
                match sym {
                    Symmetry::General => {}
                    Symmetry::Symmetric => a[(j, i)] = v,
                    Symmetry::Skew => a[(j, i)] = -v,
                }
            }
        }
        if k != vals.len() {
            return Err(perr(last, "too many values"));
        }
        if !a.is_finite() {
            return Err(tlbt_core::Error::NonFinite.into());
        }
        Ok(MmMatrix::Dense(a))
    }
}

pub fn to_coordinate_string(a: &Csc) -> String {
    let trip = a.triplets();
    let mut s = String::with_capacity(40 * trip.len() + 64);
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", a.nrows(), a.ncols(), trip.len());
    for (i, j, v) in trip {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, fmt_f64(v));
    }
    s
}

pub fn to_array_string(a: &Mat) -> String {
    let mut s = String::with_capacity(25 * a.nrows() * a.ncols() + 64);
    s.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} {}", a.nrows(), a.ncols());
    for v in a.as_slice() {
        s.push_str(&fmt_f64(*v));
        s.push('\n');
    }
    s
}

pub fn write_coordinate(path: &Path, a: &Csc) -> std::io::Result<()> {
    atomic_write(path, to_coordinate_string(a).as_bytes())
}

pub fn write_array(path: &Path, a: &Mat) -> std::io::Result<()> {
    atomic_write(path, to_array_string(a).as_bytes())
}
