use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use ricci_core::io::{self, fmt_float};
use ricci_core::{shoot, sweep_row, ShootConfig};
use serde::{Deserialize, Serialize};

use crate::config::{self, overlay, overlay_opt};
use crate::exit::{CmdResult, Exit, Failure};

/// Upper bound on the number of swept values.
const MAX_ROWS: usize = 100_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Explicit values; when set the range fields are ignored.
    pub a_values: Option<Vec<f64>>,
    pub a_min: f64,
    pub a_max: f64,
    pub a_step: f64,
    pub step: f64,
    pub r_max: f64,
    /// Sweep CSV; stdout when absent.
    pub out: Option<PathBuf>,
    /// One `r,phi,h` file per closed shot.
    pub trajectory_dir: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let s = ShootConfig::default();
        SweepConfig {
            a_values: None,
            a_min: -0.5,
            a_max: 0.5,
            a_step: 0.1,
            step: s.step,
            r_max: s.r_max,
            out: None,
            trajectory_dir: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Explicit values of a, comma separated.
    #[arg(long = "a", value_delimiter = ',', allow_hyphen_values = true)]
    a_values: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    a_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a_step: Option<f64>,
    /// RK4 step in r.
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r_max: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trajectory_dir: Option<PathBuf>,
}

/// `a_min + i·a_step` for `i = 0..=count`, computed as `(p + i)/q` when
/// the step is the reciprocal of an integer.
pub fn grid_values(a_min: f64, a_max: f64, a_step: f64) -> Result<Vec<f64>, Failure> {
    if !(a_min.is_finite()
        && a_max.is_finite()
        && a_step.is_finite()
        && a_step > 0.0
        && a_min <= a_max)
    {
        return Err(Failure::config(format!(
            "invalid sweep range [{a_min}, {a_max}] step {a_step}"
        )));
    }
    let span = (a_max - a_min) / a_step;
    let count = (span + 1e-9).floor();
    if count >= MAX_ROWS as f64 {
        return Err(Failure::config(format!(
            "sweep of {count} values exceeds {MAX_ROWS}"
        )));
    }
    let count = count as usize;
    let q = (1.0 / a_step).round();
    let p = (a_min * q).round();
    let exact = q >= 1.0 && ((1.0 / a_step) - q).abs() < 1e-9 * q && (a_min * q - p).abs() < 1e-9;
    Ok((0..=count)
        .map(|i| {
            if exact {
                (p + i as f64) / q
            } else {
                a_min + i as f64 * a_step
            }
        })
        .collect())
}

fn resolve(args: &SweepArgs) -> Result<(SweepConfig, Vec<f64>, ShootConfig), Failure> {
    let mut cfg: SweepConfig = config::load(args.config.as_deref())?;
    overlay!(cfg, args; a_min, a_max, a_step, step, r_max);
    overlay_opt!(cfg, args; a_values, out, trajectory_dir);
    let shoot_cfg = ShootConfig {
        step: cfg.step,
        r_max: cfg.r_max,
    };
    shoot_cfg.validate().map_err(Failure::invalid)?;
    let mut values = match &cfg.a_values {
        Some(v) if v.is_empty() => return Err(Failure::config("a_values is empty")),
        Some(v) if v.len() > MAX_ROWS => return Err(Failure::config("too many a_values")),
        Some(v) => v.clone(),
        None => grid_values(cfg.a_min, cfg.a_max, cfg.a_step)?,
    };
    if let Some(a) = values.iter().find(|a| !a.is_finite()) {
        return Err(Failure::config(format!("a = {a} is not finite")));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    config::check_parent(cfg.out.as_ref())?;
    config::check_dir(cfg.trajectory_dir.as_ref())?;
    Ok((cfg, values, shoot_cfg))
}

pub fn run(args: SweepArgs) -> CmdResult {
    let (cfg, values, shoot_cfg) = resolve(&args)?;
    let rows = values
        .par_iter()
        .map(|&a| sweep_row(a, &shoot_cfg))
        .collect::<Result<Vec<_>, _>>()?;

    match &cfg.out {
        Some(path) => io::write_file(path, |w| io::write_sweep(w, &rows))?,
        None => io::write_sweep(&mut std::io::stdout().lock(), &rows)?,
    }
    if let Some(dir) = &cfg.trajectory_dir {
        for row in rows.iter().filter(|r| r.hit_zero) {
            let res = shoot(row.a, &shoot_cfg)?;
            let path = dir.join(format!("trajectory_a{}.csv", fmt_float(row.a)));
            io::write_file(&path, |w| io::write_trajectory(w, &res.profile))?;
        }
    }
    Ok(Exit::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_grid_is_exact() {
        let v = grid_values(-0.5, 0.5, 0.1).unwrap();
        assert_eq!(v.len(), 11);
        assert_eq!(v[2], -0.3);
        assert_eq!(v[5], 0.0);
        assert_eq!(v[10], 0.5);
        assert_eq!(grid_values(0.3, 0.3, 0.1).unwrap(), vec![0.3]);
    }

    #[test]
    fn irregular_step_falls_back() {
        let v = grid_values(0.0, 1.0, 0.3).unwrap();
        assert_eq!(v.len(), 4);
        assert!((v[3] - 0.9).abs() < 1e-15);
        assert!(grid_values(1.0, 0.0, 0.1).is_err());
        assert!(grid_values(0.0, 1.0, 0.0).is_err());
    }
}
