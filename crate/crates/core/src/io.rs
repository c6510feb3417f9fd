//! CSV formats shared with the command line front end.
//!
//! Floats are written with 17 significant digits and a lowercase exponent.
//! Undefined values are written as empty fields.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::flow::DiagnosticsRecord;
use crate::geometry::WarpedMetric;
use crate::soliton::{SweepRow, Trajectory};

pub const PROFILE_HEADER: &str = "s,phi,h";
pub const DIAGNOSTICS_HEADER: &str = "t,area,k_min,k_max,ratio,gb_defect,entropy,r_bar";
pub const SWEEP_HEADER: &str = "a,A,h_prime_at_A,closure_defect,I,identity_residual";
pub const TRAJECTORY_HEADER: &str = "r,phi,h";

/// Stored `s` values may differ from the uniform grid by this much.
const GRID_TOL: f64 = 1e-9;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn row(w: &mut impl Write, fields: &[String]) -> Result<()> {
    writeln!(w, "{}", fields.join(","))?;
    Ok(())
}

pub fn write_profile(w: &mut impl Write, metric: &WarpedMetric) -> Result<()> {
    writeln!(w, "{PROFILE_HEADER}")?;
    let s = metric.grid().coords();
    for ((s, phi), h) in s.iter().zip(metric.phi()).zip(metric.h()) {
        row(w, &[fmt_float(*s), fmt_float(*phi), fmt_float(*h)])?;
    }
    Ok(())
}

pub fn read_profile(r: impl Read) -> Result<WarpedMetric> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["s", "phi", "h"] {
        return Err(Error::Io(format!(
            "expected header `{PROFILE_HEADER}`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut s, mut phi, mut h) = (Vec::new(), Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let mut vals = [0.0; 3];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = record.get(k).unwrap_or("");
            *v = field.parse().map_err(|_| {
                Error::Io(format!(
                    "row {}: cannot parse `{field}` as a float",
                    line + 1
                ))
            })?;
        }
        s.push(vals[0]);
        phi.push(vals[1]);
        h.push(vals[2]);
    }
    let metric = WarpedMetric::new(phi, h)?;
    let grid = metric.grid();
    if let Some(i) = (0..s.len()).find(|&i| (s[i] - grid.coord(i)).abs() > GRID_TOL) {
        return Err(Error::InvalidMetric(format!(
            "s must be the uniform grid on [0, 1], got {} at node {i}",
            s[i]
        )));
    }
    Ok(metric)
}

pub fn write_diagnostics(w: &mut impl Write, records: &[DiagnosticsRecord]) -> Result<()> {
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for r in records {
        row(
            w,
            &[
                fmt_float(r.t),
                fmt_float(r.area),
                fmt_float(r.k_min),
                fmt_float(r.k_max),
                fmt_opt(r.ratio),
                fmt_float(r.gb_defect),
                fmt_opt(r.entropy),
                fmt_float(r.r_bar),
            ],
        )?;
    }
    Ok(())
}

pub fn write_sweep(w: &mut impl Write, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        row(
            w,
            &[
                fmt_float(r.a),
                fmt_opt(r.closure_radius),
                fmt_opt(r.h_prime_at_end),
                fmt_opt(r.closure_defect),
                fmt_opt(r.correction_integral),
                fmt_opt(r.identity_residual),
            ],
        )?;
    }
    Ok(())
}

/// Arclength trajectory in the profile layout, with `φ ≡ 1`.
pub fn write_trajectory(w: &mut impl Write, traj: &Trajectory) -> Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for (r, h) in traj.r.iter().zip(&traj.h) {
        row(w, &[fmt_float(*r), fmt_float(1.0), fmt_float(*h)])?;
    }
    Ok(())
}

/// `{stem}_t{t}.csv` with the time in the float format used inside files.
pub fn snapshot_name(stem: &str, t: f64) -> String {
    format!("{stem}_t{}.csv", fmt_float(t))
}

/// Create `path` and hand a buffered writer to `body`.
pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_profile_file(path: &Path) -> Result<WarpedMetric> {
    read_profile(File::open(path)?)
}
