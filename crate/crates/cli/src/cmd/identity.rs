use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use ricci_core::{identity_report, reconstructed_defect, shoot, ShootConfig};
use serde::{Deserialize, Serialize};

use crate::config::{self, overlay, overlay_opt};
use crate::exit::{CmdResult, Exit, Failure};
use crate::json::{emit, Sci};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    pub a_values: Vec<f64>,
    pub step: f64,
    pub r_max: f64,
    /// Largest accepted `|residual|` at `step`.
    pub tol: f64,
    /// Smallest accepted residual drop when the step halves.
    pub min_ratio: f64,
    pub out: Option<PathBuf>,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        let s = ShootConfig::default();
        IdentityConfig {
            a_values: vec![-0.5, -0.3, -0.1, 0.0, 0.1, 0.3, 0.5],
            step: s.step,
            r_max: s.r_max,
            tol: 1e-8,
            min_ratio: 12.0,
            out: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "a", value_delimiter = ',', allow_hyphen_values = true)]
    a_values: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    min_ratio: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    a: Sci,
    lhs: Sci,
    rhs_boundary: Sci,
    correction_integral: Sci,
    residual: Sci,
    residual_half_step: Sci,
    /// `|residual| / |residual_half_step|`.
    ratio: Sci,
    closure_defect: Sci,
    reconstructed_defect: Sci,
    pass: bool,
}

#[derive(Serialize)]
struct Report {
    step: Sci,
    tol: Sci,
    min_ratio: Sci,
    rows: Vec<Row>,
    pass: bool,
}

fn check(a: f64, cfg: &IdentityConfig) -> ricci_core::Result<Row> {
    let coarse = ShootConfig {
        step: cfg.step,
        r_max: cfg.r_max,
    };
    let fine = ShootConfig {
        step: 0.5 * cfg.step,
        ..coarse
    };
    let res = shoot(a, &coarse)?;
    let rep = identity_report(&res)?;
    let half = identity_report(&shoot(a, &fine)?)?;
    let ratio = rep.residual.abs() / half.residual.abs();
    Ok(Row {
        a: Sci(a),
        lhs: Sci(rep.lhs),
        rhs_boundary: Sci(rep.rhs_boundary),
        correction_integral: Sci(rep.correction_integral),
        residual: Sci(rep.residual),
        residual_half_step: Sci(half.residual),
        ratio: Sci(ratio),
        closure_defect: Sci(res.closure_defect.unwrap_or(f64::NAN)),
        reconstructed_defect: Sci(reconstructed_defect(a, rep.correction_integral)),
        pass: rep.residual.abs() < cfg.tol && ratio >= cfg.min_ratio,
    })
}

pub fn run(args: IdentityArgs) -> CmdResult {
    let mut cfg: IdentityConfig = config::load(args.config.as_deref())?;
    overlay!(cfg, args; a_values, step, r_max, tol, min_ratio);
    overlay_opt!(cfg, args; out);
    ShootConfig {
        step: 0.5 * cfg.step,
        r_max: cfg.r_max,
    }
    .validate()
    .map_err(Failure::invalid)?;
    if cfg.a_values.is_empty() || cfg.a_values.iter().any(|a| !a.is_finite()) {
        return Err(Failure::config(
            "a_values must be a non-empty list of finite numbers",
        ));
    }
    if !(cfg.tol > 0.0 && cfg.min_ratio > 0.0) {
        return Err(Failure::config("tol and min_ratio must be positive"));
    }
    config::check_parent(cfg.out.as_ref())?;

    let mut values = cfg.a_values.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let rows = values
        .par_iter()
        .map(|&a| check(a, &cfg))
        .collect::<ricci_core::Result<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.pass);
    for r in rows.iter().filter(|r| !r.pass) {
        eprintln!(
            "identity check failed at a = {:e}: residual {:e}, ratio {:.3}",
            r.a.0, r.residual.0, r.ratio.0
        );
    }
    emit(
        &Report {
            step: Sci(cfg.step),
            tol: Sci(cfg.tol),
            min_ratio: Sci(cfg.min_ratio),
            rows,
            pass,
        },
        cfg.out.as_deref(),
    )?;
    Ok(if pass { Exit::Ok } else { Exit::Numerical })
}
