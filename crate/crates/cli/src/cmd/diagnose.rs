use std::path::PathBuf;

use clap::Args;
use ricci_core::{boundary_defects, einstein_defect, io, Error, FlowState};
use serde::Serialize;

use crate::exit::{CmdResult, Exit, Failure};
use crate::json::{emit, sci, Sci};

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Profile CSV with header `s,phi,h`.
    profile: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    n: usize,
    area: Sci,
    k_min: Sci,
    k_max: Sci,
    ratio: Option<Sci>,
    gb_defect: Sci,
    entropy: Option<Sci>,
    r_bar: Sci,
    einstein_defect: Sci,
    total_length: Sci,
    gauge_distortion: Sci,
    boundary_defect: Sci,
    stable_dt: Sci,
}

pub fn run(args: DiagnoseArgs) -> CmdResult {
    crate::config::check_parent(args.out.as_ref())?;
    let metric = match io::read_profile_file(&args.profile) {
        Ok(m) => m,
        Err(e @ Error::Io(_)) => return Err(Failure::new(Exit::Io, e.to_string())),
        Err(e) => return Err(Failure::config(format!("{}: {e}", args.profile.display()))),
    };
    let state = FlowState::new(metric);
    let rec = ricci_core::diagnostics(&state)?;
    let m = &state.metric;
    let report = Report {
        n: m.len(),
        area: Sci(rec.area),
        k_min: Sci(rec.k_min),
        k_max: Sci(rec.k_max),
        ratio: sci(rec.ratio),
        gb_defect: Sci(rec.gb_defect),
        entropy: sci(rec.entropy),
        r_bar: Sci(rec.r_bar),
        einstein_defect: Sci(einstein_defect(m)?),
        total_length: Sci(ricci_core::geometry::total_length(m)),
        gauge_distortion: Sci(m.gauge_distortion()),
        boundary_defect: Sci(boundary_defects(m).max_abs()),
        stable_dt: Sci(ricci_core::stable_dt(m)?),
    };
    emit(&report, args.out.as_deref())?;
    Ok(Exit::Ok)
}
