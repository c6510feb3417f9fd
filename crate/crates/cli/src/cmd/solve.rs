use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use ricci_core::{einstein_defect, io, solve_closure, Error, ShootConfig};
use serde::{Deserialize, Serialize};

use crate::config::{self, overlay, overlay_opt};
use crate::exit::{CmdResult, Exit, Failure};
use crate::json::{emit, Sci};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub a_lo: f64,
    pub a_hi: f64,
    /// Golden-section search stops below this bracket width.
    pub bracket_tol: f64,
    /// Exit 0 only when `|a*|` is below this.
    pub tol: f64,
    /// Grid for the closed profile.
    pub n: usize,
    pub step: f64,
    pub r_max: f64,
    pub out: Option<PathBuf>,
    pub profile_out: Option<PathBuf>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let s = ShootConfig::default();
        SolveConfig {
            a_lo: -1.0,
            a_hi: 1.0,
            bracket_tol: 1e-8,
            tol: 1e-6,
            n: 1001,
            step: s.step,
            r_max: s.r_max,
            out: None,
            profile_out: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    a_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a_hi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    bracket_tol: Option<f64>,
    /// Largest |a*| accepted as the Einstein case.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r_max: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    a_star: Sci,
    closure_defect: Sci,
    closure_radius: Sci,
    einstein_defect: Sci,
    /// `sup |h − sin r|` over the closed profile.
    sine_deviation: Sci,
    at_boundary: bool,
    evaluations: usize,
    tol: Sci,
    pass: bool,
}

pub fn run(args: SolveArgs) -> CmdResult {
    let mut cfg: SolveConfig = config::load(args.config.as_deref())?;
    overlay!(cfg, args; a_lo, a_hi, bracket_tol, tol, n, step, r_max);
    overlay_opt!(cfg, args; out, profile_out);
    let shoot_cfg = ShootConfig {
        step: cfg.step,
        r_max: cfg.r_max,
    };
    shoot_cfg.validate().map_err(Failure::invalid)?;
    if !(cfg.a_lo.is_finite() && cfg.a_hi.is_finite() && cfg.a_lo < cfg.a_hi) {
        return Err(Failure::config(format!(
            "invalid bracket [{}, {}]",
            cfg.a_lo, cfg.a_hi
        )));
    }
    if !(cfg.bracket_tol > 0.0 && cfg.tol > 0.0) {
        return Err(Failure::config("bracket_tol and tol must be positive"));
    }
    ricci_core::RadialGrid::new(cfg.n).map_err(Failure::invalid)?;
    config::check_parent(cfg.out.as_ref())?;
    config::check_parent(cfg.profile_out.as_ref())?;

    let sol = match solve_closure(cfg.a_lo, cfg.a_hi, cfg.bracket_tol, &shoot_cfg) {
        Err(e @ Error::NoClosure { .. }) => return Err(Failure::new(Exit::Solve, e.to_string())),
        other => other?,
    };
    let profile = sol.result.closed_profile(cfg.n)?;
    let r = ricci_core::arclength(&profile);
    let sine_deviation = profile
        .h()
        .iter()
        .zip(&r)
        .map(|(h, r)| (h - r.sin()).abs())
        .fold(0.0, f64::max);
    let pass = sol.a_star.abs() < cfg.tol;
    let report = Report {
        a_star: Sci(sol.a_star),
        closure_defect: Sci(sol.result.closure_defect.unwrap_or(f64::NAN)),
        closure_radius: Sci(sol.result.closure_radius.unwrap_or(f64::NAN)),
        einstein_defect: Sci(einstein_defect(&profile)?),
        sine_deviation: Sci(sine_deviation),
        at_boundary: sol.at_boundary,
        evaluations: sol.evaluations,
        tol: Sci(cfg.tol),
        pass,
    };
    emit(&report, cfg.out.as_deref())?;
    if let Some(path) = &cfg.profile_out {
        io::write_file(path, |w| io::write_profile(w, &profile))?;
    }
    if pass {
        Ok(Exit::Ok)
    } else {
        eprintln!(
            "closure minimum at a = {:e} (defect {:e}, closure radius vs pi {:e}) is not the Einstein case",
            sol.a_star,
            sol.result.closure_defect.unwrap_or(f64::NAN),
            sol.result.closure_radius.unwrap_or(f64::NAN) - PI
        );
        Ok(Exit::Solve)
    }
}
