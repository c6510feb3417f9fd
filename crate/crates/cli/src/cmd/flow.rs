use std::path::PathBuf;

use clap::Args;
use ricci_core::io::{self, snapshot_name};
use ricci_core::{geometry, make_profile, FlowConfig, FlowOutcome, WarpedMetric};
use serde::{Deserialize, Serialize};

use crate::config::{self, overlay, overlay_opt, Family, Mode};
use crate::exit::{CmdResult, Exit, Failure};
use crate::json::{emit, sci, Sci};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowCmdConfig {
    pub family: Family,
    pub eps: f64,
    pub k: u32,
    pub n: usize,
    pub mode: Mode,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub regrid_trigger: f64,
    pub convergence_tol: f64,
    pub extinction_fraction: f64,
    /// Diagnostics CSV; stdout when absent.
    pub out: Option<PathBuf>,
    /// Final summary JSON; stdout when absent, or stderr if diagnostics use stdout.
    pub summary: Option<PathBuf>,
    pub snapshot_dir: Option<PathBuf>,
    /// Write a snapshot at every this many records.
    pub snapshot_every: usize,
}

impl Default for FlowCmdConfig {
    fn default() -> Self {
        let f = FlowConfig::default();
        FlowCmdConfig {
            family: Family::Round,
            eps: 0.3,
            k: 1,
            n: 101,
            mode: Mode::Normalized,
            dt: f.dt,
            t_end: f.t_end,
            record_every: f.record_every,
            regrid_trigger: f.regrid_trigger,
            convergence_tol: f.convergence_tol,
            extinction_fraction: f.extinction_fraction,
            out: None,
            summary: None,
            snapshot_dir: None,
            snapshot_every: 1,
        }
    }
}

impl FlowCmdConfig {
    fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            mode: self.mode.into(),
            dt: self.dt,
            t_end: self.t_end,
            record_every: self.record_every,
            regrid_trigger: self.regrid_trigger,
            convergence_tol: self.convergence_tol,
            extinction_fraction: self.extinction_fraction,
        }
    }
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long)]
    k: Option<u32>,
    /// Grid nodes (odd).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    regrid_trigger: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    convergence_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    extinction_fraction: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    #[arg(long)]
    snapshot_every: Option<usize>,
}

#[derive(Serialize)]
struct Summary {
    outcome: &'static str,
    t: Sci,
    steps: usize,
    regrids: usize,
    records: usize,
    area: Sci,
    k_min: Sci,
    k_max: Sci,
    ratio: Option<Sci>,
    gb_defect: Sci,
    entropy: Option<Sci>,
}

fn resolve(args: &FlowArgs) -> Result<(FlowCmdConfig, WarpedMetric), Failure> {
    let mut cfg: FlowCmdConfig = config::load(args.config.as_deref())?;
    overlay!(cfg, args; family, eps, k, n, mode, dt, t_end, record_every, regrid_trigger,
        convergence_tol, extinction_fraction, snapshot_every);
    overlay_opt!(cfg, args; out, summary, snapshot_dir);
    cfg.flow_config().validate().map_err(Failure::invalid)?;
    if cfg.snapshot_every == 0 {
        return Err(Failure::config("snapshot_every must be at least 1"));
    }
    config::check_parent(cfg.out.as_ref())?;
    config::check_parent(cfg.summary.as_ref())?;
    config::check_dir(cfg.snapshot_dir.as_ref())?;
    let metric =
        make_profile(cfg.family.profile(cfg.eps, cfg.k), cfg.n).map_err(Failure::invalid)?;
    // A profile the curvature operator rejects is a bad config, not a
    // numerical failure of the flow.
    geometry::curvature(&metric).map_err(Failure::invalid)?;
    Ok((cfg, metric))
}

pub fn run(args: FlowArgs) -> CmdResult {
    let (cfg, metric) = resolve(&args)?;
    let mut seen = 0usize;
    let flow = ricci_core::run_observed(metric, &cfg.flow_config(), |state, _| {
        if let Some(dir) = &cfg.snapshot_dir {
            if seen.is_multiple_of(cfg.snapshot_every) {
                let path = dir.join(snapshot_name("profile", state.t));
                io::write_file(&path, |w| io::write_profile(w, &state.metric))?;
            }
        }
        seen += 1;
        Ok(())
    })?;

    match &cfg.out {
        Some(path) => io::write_file(path, |w| io::write_diagnostics(w, &flow.records))?,
        None => io::write_diagnostics(&mut std::io::stdout().lock(), &flow.records)?,
    }
    let last = flow.last_record();
    let summary = Summary {
        outcome: match flow.outcome {
            FlowOutcome::Converged => "converged",
            FlowOutcome::Completed => "completed",
            FlowOutcome::Extinct => "extinct",
        },
        t: Sci(flow.state.t),
        steps: flow.steps,
        regrids: flow.regrids.len(),
        records: flow.records.len(),
        area: Sci(last.area),
        k_min: Sci(last.k_min),
        k_max: Sci(last.k_max),
        ratio: sci(last.ratio),
        gb_defect: Sci(last.gb_defect),
        entropy: sci(last.entropy),
    };
    // diagnostics on stdout push the summary to stderr
    match (&cfg.summary, &cfg.out) {
        (Some(path), _) => emit(&summary, Some(path))?,
        (None, Some(_)) => emit(&summary, None)?,
        (None, None) => eprintln!("{}", serde_json::to_string(&summary).unwrap_or_default()),
    }
    Ok(match flow.outcome {
        FlowOutcome::Extinct => Exit::Extinct,
        _ => Exit::Ok,
    })
}
