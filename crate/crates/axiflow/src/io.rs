//! File formats: trajectory CSV, physical-profile CSV (`x,v,u`),
//! transplanted-profile JSON (`{c, d, n, values}`), and report JSON.
//!
//! Every float is written with Rust's shortest round-trip formatting and
//! rows are emitted in a fixed order, so a rerun with identical inputs
//! produces byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{HProfile, PhysicalProfile};
use crate::stepper::Trajectory;

pub const TRAJECTORY_HEADER: &str = "t,a,b,c,d,area,min_h,h2_0,h2_pi";
pub const PHYSICAL_HEADER: &str = "x,v,u";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (traj.scalars.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.scalars {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.t, s.a, s.b, s.c, s.d, s.area, s.min_h, s.h2_0, s.h2_pi
        )
        .expect("writing to String cannot fail");
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    fs::write(path, trajectory_csv(traj)).map_err(|e| io_err(path, e))
}

pub fn physical_csv(p: &PhysicalProfile) -> String {
    let mut out = String::with_capacity(48 * (p.xs().len() + 1));
    out.push_str(PHYSICAL_HEADER);
    out.push('\n');
    for ((&x, &v), &u) in p.xs().iter().zip(p.v()).zip(p.u()) {
        writeln!(out, "{x},{v},{u}").expect("writing to String cannot fail");
    }
    out
}

pub fn write_physical_csv(path: &Path, p: &PhysicalProfile) -> Result<()> {
    fs::write(path, physical_csv(p)).map_err(|e| io_err(path, e))
}

/// Reads a physical profile from CSV with header `x,v` or `x,v,u`; a
/// third column, if present, is ignored and u is recomputed as √(2v) so
/// the two stored fields can never disagree.
pub fn read_physical_csv(path: &Path) -> Result<PhysicalProfile> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput(format!("{}: empty profile file", path.display())))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols[0] != "x" || cols[1] != "v" {
        return Err(Error::InvalidInput(format!(
            "{}: expected CSV header starting `x,v`, got `{header}`",
            path.display()
        )));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let bad = || {
            Error::InvalidInput(format!(
                "{}: line {}: expected `x,v[,u]`, got `{line}`",
                path.display(),
                k + 2
            ))
        };
        let x: f64 = fields.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let v: f64 = fields.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        xs.push(x);
        vs.push(v);
    }
    PhysicalProfile::from_v(xs, vs)
}

/// JSON record for a transplanted profile; kept separate from HProfile
/// so deserialization re-runs the constructor's invariant checks.
#[derive(Debug, Serialize, Deserialize)]
struct HProfileRecord {
    c: f64,
    d: f64,
    n: usize,
    values: Vec<f64>,
}

pub fn h_profile_json(h: &HProfile) -> String {
    let rec = HProfileRecord {
        c: h.c(),
        d: h.d(),
        n: h.n(),
        values: h.values().to_vec(),
    };
    serde_json::to_string(&rec).expect("profile record serialization cannot fail")
}

pub fn write_h_profile_json(path: &Path, h: &HProfile) -> Result<()> {
    fs::write(path, h_profile_json(h)).map_err(|e| io_err(path, e))
}

pub fn read_h_profile_json(path: &Path) -> Result<HProfile> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let rec: HProfileRecord = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if rec.values.len() != rec.n + 1 {
        return Err(Error::InvalidInput(format!(
            "{}: n = {} does not match {} samples",
            path.display(),
            rec.n,
            rec.values.len()
        )));
    }
    HProfile::new(rec.values, rec.c, rec.d)
}

/// Serializes any report type (SingularityReport, SpectrumReport,
/// ValidationReport summaries) as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}
