//! File formats: pm-net JSON, coupling CSV and PGM heatmaps.
//!
//! Pm-net files hold `{"n", "mu", "T", "nu", "labels", "kernels"}` with
//! `kernels[t][i][j]` row-major. Numbers are written with 17 significant
//! digits so a write/read round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{PgwError, Result};
use crate::network::{Matrix, PmNet};

fn num(out: &mut String, v: f64) {
    if v == 0.0 {
        out.push('0');
    } else {
        write!(out, "{v:.16e}").expect("writing to a string");
    }
}

fn num_list(out: &mut String, vs: impl IntoIterator<Item = f64>) {
    out.push('[');
    for (k, v) in vs.into_iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        num(out, v);
    }
    out.push(']');
}

/// Serializes a pm-net to the JSON exchange format.
pub fn pm_net_to_json(x: &PmNet) -> String {
    let n = x.len();
    let mut out = String::new();
    write!(out, "{{\n  \"n\": {n},\n  \"mu\": ").unwrap();
    num_list(&mut out, x.mu().iter().copied());
    write!(out, ",\n  \"T\": {},\n  \"nu\": ", x.num_params()).unwrap();
    num_list(&mut out, x.nu().iter().copied());
    out.push_str(",\n  \"labels\": ");
    out.push_str(&serde_json::to_string(x.labels()).expect("strings serialize"));
    out.push_str(",\n  \"kernels\": [");
    for (t, k) in x.kernels().iter().enumerate() {
        out.push_str(if t > 0 { ",\n    [" } else { "\n    [" });
        for i in 0..n {
            if i > 0 {
                out.push(',');
            }
            out.push_str("\n      ");
            num_list(&mut out, (0..n).map(|j| k[(i, j)]));
        }
        out.push_str("\n    ]");
    }
    out.push_str("\n  ]\n}\n");
    out
}

#[derive(Deserialize)]
struct PmNetFile {
    n: usize,
    mu: Vec<f64>,
    #[serde(rename = "T")]
    t: usize,
    nu: Vec<f64>,
    labels: Vec<String>,
    kernels: Vec<Vec<Vec<f64>>>,
}

/// Parses the JSON exchange format. Shape errors are reported as
/// [`PgwError::Format`], invariant violations as [`PgwError::InvalidInput`].
pub fn pm_net_from_json(text: &str) -> Result<PmNet> {
    let f: PmNetFile = serde_json::from_str(text).map_err(|e| PgwError::Format(e.to_string()))?;
    if f.mu.len() != f.n || f.nu.len() != f.t || f.labels.len() != f.t || f.kernels.len() != f.t {
        return Err(PgwError::Format(format!("declared n = {}, T = {} do not match the arrays", f.n, f.t)));
    }
    let mut kernels = Vec::with_capacity(f.t);
    for (t, rows) in f.kernels.iter().enumerate() {
        if rows.len() != f.n || rows.iter().any(|r| r.len() != f.n) {
            return Err(PgwError::Format(format!("kernel {t} is not {0} x {0}", f.n)));
        }
        kernels.push(Matrix::from_fn(f.n, f.n, |i, j| rows[i][j]));
    }
    PmNet::new(kernels, f.mu, f.nu, f.labels)
}

pub fn write_pm_net(x: &PmNet, path: &Path) -> Result<()> {
    fs::write(path, pm_net_to_json(x))?;
    Ok(())
}

pub fn read_pm_net(path: &Path) -> Result<PmNet> {
    pm_net_from_json(&fs::read_to_string(path)?)
}

/// One line per row, comma-separated, no header.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            num(&mut out, m[(i, j)]);
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| PgwError::Format(format!("{v:?}: {e}"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PgwError::Format("ragged csv rows".into()));
    }
    Ok(Matrix::from_fn(rows.len(), m, |i, j| rows[i][j]))
}

pub fn write_csv(m: &Matrix, path: &Path) -> Result<()> {
    fs::write(path, matrix_to_csv(m))?;
    Ok(())
}

/// Binary greyscale PGM of `m`, linearly scaled so the minimum is black and
/// the maximum white.
pub fn matrix_to_pgm(m: &Matrix) -> Vec<u8> {
    let (lo, hi) = (m.min(), m.max());
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", m.ncols(), m.nrows()).into_bytes();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let level = if span > 0.0 { (m[(i, j)] - lo) / span * 255.0 } else { 0.0 };
            out.push(level.round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

pub fn write_pgm(m: &Matrix, path: &Path) -> Result<()> {
    fs::write(path, matrix_to_pgm(m))?;
    Ok(())
}
