//! The invariant suite behind `ricci verify`.
//!
//! Every check produces one named entry with the measured value and its
//! limit. A kernel error inside a check fails that entry only, so one
//! broken invariant never hides the others.

use std::f64::consts::{LN_2, PI};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use ricci_core::geometry::{self, CurvatureField, CurvatureOperator};
use ricci_core::symmetry::{killing_residual, AngularField};
use ricci_core::{
    arclength, area, conformal_residual, einstein_defect, entropy, identity_report,
    killing_residual_of_potential, make_profile, potential_from_a, reconstructed_defect, shoot,
    soliton_residuals, solve_closure, stable_dt, step, FlowConfig, FlowMode, FlowOutcome,
    FlowState, ProfileFamily, RadialGrid, ShootConfig, WarpedMetric,
};
use serde::{Deserialize, Serialize};

use crate::config::{self, overlay, overlay_opt};
use crate::exit::{CmdResult, Exit, Failure};
use crate::json::{emit, Sci};

/// Nominal order of the finite-difference stencils.
const STENCIL_ORDER: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Scales every second derivative of `h` by `1 + 1e-3`.
    BrokenStencil,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub gauss_bonnet: f64,
    pub gauss_bonnet_order: f64,
    pub identity_residual: f64,
    pub identity_ratio: f64,
    pub nonclosure_defect: f64,
    pub reconstruction: f64,
    pub einstein_closure: f64,
    pub solve_a_star: f64,
    pub solve_closure: f64,
    pub sine_deviation: f64,
    pub einstein_defect: f64,
    pub killing: f64,
    pub conformal: f64,
    pub soliton_residual: f64,
    pub killing_oracle: f64,
    pub fixed_point: f64,
    pub flow_ratio: f64,
    pub flow_area: f64,
    pub flow_curvature: f64,
    pub entropy_increase: f64,
    pub entropy_round: f64,
    pub area_slope: f64,
    pub extinction_time: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gauss_bonnet: 1e-5,
            gauss_bonnet_order: 0.5,
            identity_residual: 1e-8,
            identity_ratio: 12.0,
            nonclosure_defect: 0.01,
            reconstruction: 1e-6,
            einstein_closure: 1e-10,
            solve_a_star: 1e-6,
            solve_closure: 1e-8,
            sine_deviation: 1e-6,
            einstein_defect: 1e-5,
            killing: 1e-8,
            conformal: 1e-6,
            soliton_residual: 1e-5,
            killing_oracle: 1e-4,
            fixed_point: 1e-6,
            flow_ratio: 1e-2,
            flow_area: 1e-4,
            flow_curvature: 1e-2,
            entropy_increase: 1e-6,
            entropy_round: 1e-4,
            area_slope: 1e-2,
            extinction_time: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Grid for the geometric and closed-profile checks; the order fit
    /// also uses the two coarser grids `2⌊(n−1)/4⌋ + 1` below it.
    pub n: usize,
    pub flow_n: usize,
    pub extinction_n: usize,
    pub fixed_point_steps: usize,
    /// Shooting step.
    pub step: f64,
    pub tolerances: Tolerances,
    pub inject_fault: Option<Fault>,
    pub out: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 1001,
            flow_n: 101,
            extinction_n: 51,
            fixed_point_steps: 10_000,
            step: ShootConfig::default().step,
            tolerances: Tolerances::default(),
            inject_fault: None,
            out: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    flow_n: Option<usize>,
    #[arg(long)]
    extinction_n: Option<usize>,
    #[arg(long)]
    fixed_point_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    /// Test hook: corrupt a kernel and check that the suite notices.
    #[arg(long, value_enum)]
    inject_fault: Option<Fault>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Invariant {
    name: String,
    measured: Sci,
    relation: &'static str,
    limit: Sci,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn below(name: impl Into<String>, measured: f64, limit: f64) -> Invariant {
    Invariant {
        name: name.into(),
        measured: Sci(measured),
        relation: "<",
        limit: Sci(limit),
        pass: measured < limit,
        error: None,
    }
}

fn above(name: impl Into<String>, measured: f64, limit: f64) -> Invariant {
    Invariant {
        relation: ">",
        pass: measured > limit,
        ..below(name, measured, limit)
    }
}

fn failed(name: impl Into<String>, limit: f64, e: ricci_core::Error) -> Invariant {
    Invariant {
        pass: false,
        error: Some(e.to_string()),
        ..below(name, f64::NAN, limit)
    }
}

#[derive(Serialize)]
struct Report {
    n: usize,
    flow_n: usize,
    extinction_n: usize,
    step: Sci,
    fault: Option<Fault>,
    invariants: Vec<Invariant>,
    failed: Vec<String>,
    pass: bool,
}

/// Coarser grid used by the order fit.
fn coarser(n: usize) -> usize {
    2 * ((n - 1) / 4) + 1
}

/// Least-squares slope of `log y` against `log x`.
fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slope of `y` against `x`.
fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

struct Suite<'a> {
    cfg: &'a VerifyConfig,
    tol: &'a Tolerances,
}

impl Suite<'_> {
    fn shoot_config(&self, step: f64) -> ShootConfig {
        ShootConfig {
            step,
            ..ShootConfig::default()
        }
    }

    /// Gauss–Bonnet defect through the hookable derivative path.
    fn gb_defect(&self, metric: &WarpedMetric) -> ricci_core::Result<f64> {
        let op = CurvatureOperator::new(metric.grid());
        let mut d = op.derivatives(metric.phi(), metric.h());
        if self.cfg.inject_fault == Some(Fault::BrokenStencil) {
            d.h_ss.iter_mut().for_each(|v| *v *= 1.0 + 1e-3);
        }
        let mut values = vec![0.0; metric.len()];
        op.curvature_from(metric.phi(), metric.h(), &d, &mut values)?;
        Ok(geometry::gauss_bonnet_from(
            metric,
            &CurvatureField { values },
        ))
    }

    fn gauss_bonnet(&self) -> Vec<Invariant> {
        let families = [
            ("round", ProfileFamily::Round),
            ("perturbed_0.3", ProfileFamily::Perturbed { eps: 0.3, k: 1 }),
            (
                "perturbed_-0.3",
                ProfileFamily::Perturbed { eps: -0.3, k: 1 },
            ),
        ];
        let n = self.cfg.n;
        let levels = [coarser(coarser(n)), coarser(n), n];
        let mut out = Vec::new();
        for (label, family) in families {
            let defects: ricci_core::Result<Vec<f64>> = levels
                .iter()
                .map(|&m| make_profile(family, m).and_then(|p| self.gb_defect(&p)))
                .collect();
            match defects {
                Ok(d) => {
                    out.push(below(
                        format!("gauss_bonnet[{label}]"),
                        d[2].abs(),
                        self.tol.gauss_bonnet,
                    ));
                    let spacing: Vec<f64> = levels.iter().map(|&m| 1.0 / (m - 1) as f64).collect();
                    let order = loglog_slope(&spacing, &d);
                    out.push(below(
                        format!("gauss_bonnet_order[{label}]"),
                        (order - STENCIL_ORDER).abs(),
                        self.tol.gauss_bonnet_order,
                    ));
                }
                Err(e) => {
                    out.push(failed(
                        format!("gauss_bonnet[{label}]"),
                        self.tol.gauss_bonnet,
                        e.clone(),
                    ));
                    out.push(failed(
                        format!("gauss_bonnet_order[{label}]"),
                        self.tol.gauss_bonnet_order,
                        e,
                    ));
                }
            }
        }
        out
    }

    fn identity(&self) -> Vec<Invariant> {
        let tol = self.tol;
        let sweep: Vec<f64> = (-5..=5).map(|k| k as f64 / 10.0).collect();
        let halved = [-0.5, -0.3, -0.1, 0.0, 0.1, 0.3, 0.5];
        let coarse = self.shoot_config(self.cfg.step);
        let fine = self.shoot_config(0.5 * self.cfg.step);
        let rows: ricci_core::Result<Vec<_>> = sweep
            .iter()
            .map(|&a| {
                let res = shoot(a, &coarse)?;
                let rep = identity_report(&res)?;
                let ratio = if halved.contains(&a) {
                    let half = identity_report(&shoot(a, &fine)?)?;
                    Some(rep.residual.abs() / half.residual.abs())
                } else {
                    None
                };
                Ok((a, res.closure_defect.unwrap_or(f64::NAN), rep, ratio))
            })
            .collect();
        let names = [
            ("identity_residual", tol.identity_residual),
            ("identity_order_ratio", tol.identity_ratio),
            ("nonclosure_defect", tol.nonclosure_defect),
            ("identity_reconstruction", tol.reconstruction),
            ("correction_integral_positive", 0.0),
            ("einstein_shot_closure", tol.einstein_closure),
        ];
        let rows = match rows {
            Ok(rows) => rows,
            Err(e) => {
                return names
                    .iter()
                    .map(|(n, l)| failed(*n, *l, e.clone()))
                    .collect()
            }
        };
        let max_residual = rows.iter().map(|r| r.2.residual.abs()).fold(0.0, f64::max);
        let min_ratio = rows
            .iter()
            .filter_map(|r| r.3)
            .fold(f64::INFINITY, f64::min);
        let nonzero = || rows.iter().filter(|r| r.0 != 0.0);
        let min_defect = nonzero().map(|r| r.1).fold(f64::INFINITY, f64::min);
        let max_recon = nonzero()
            .map(|r| (r.1 - reconstructed_defect(r.0, r.2.correction_integral)).abs())
            .fold(0.0, f64::max);
        let min_integral = rows
            .iter()
            .map(|r| r.2.correction_integral)
            .fold(f64::INFINITY, f64::min);
        let zero_defect = rows.iter().find(|r| r.0 == 0.0).map_or(f64::NAN, |r| r.1);
        vec![
            below(names[0].0, max_residual, names[0].1),
            Invariant {
                relation: ">=",
                pass: min_ratio >= tol.identity_ratio,
                ..below(names[1].0, min_ratio, names[1].1)
            },
            above(names[2].0, min_defect, names[2].1),
            below(names[3].0, max_recon, names[3].1),
            above(names[4].0, min_integral, names[4].1),
            below(names[5].0, zero_defect, names[5].1),
        ]
    }

    fn closure(&self) -> Vec<Invariant> {
        let tol = self.tol;
        let names = [
            ("solve_a_star", tol.solve_a_star),
            ("solve_closure_defect", tol.solve_closure),
            ("closed_profile_sine_deviation", tol.sine_deviation),
            ("closed_profile_einstein_defect", tol.einstein_defect),
            ("closed_profile_killing_residual", tol.killing),
            ("closed_profile_conformal_residual", tol.conformal),
            ("closed_profile_soliton_residual", tol.soliton_residual),
        ];
        let measured = || -> ricci_core::Result<Vec<f64>> {
            let sol = solve_closure(-1.0, 1.0, 1e-8, &self.shoot_config(self.cfg.step))?;
            let profile = sol.result.closed_profile(self.cfg.n)?;
            let r = arclength(&profile);
            let sine = profile
                .h()
                .iter()
                .zip(&r)
                .map(|(h, r)| (h - r.sin()).abs())
                .fold(0.0, f64::max);
            let f = potential_from_a(&profile, sol.a_star);
            Ok(vec![
                sol.a_star.abs(),
                sol.result.closure_defect.unwrap_or(f64::NAN),
                sine,
                einstein_defect(&profile)?,
                killing_residual_of_potential(&profile, &f)?,
                conformal_residual(&profile, &f)?,
                soliton_residuals(&profile, &f, 1.0)?.sup(),
            ])
        };
        match measured() {
            Ok(v) => names
                .iter()
                .zip(v)
                .map(|((n, l), m)| below(*n, m, *l))
                .collect(),
            Err(e) => names
                .iter()
                .map(|(n, l)| failed(*n, *l, e.clone()))
                .collect(),
        }
    }

    fn killing_oracle(&self) -> Vec<Invariant> {
        let limit = self.tol.killing_oracle;
        let name = "killing_residual_sine_field";
        let oracle = 2.0 / (3.0 * 3f64.sqrt());
        let measured = make_profile(ProfileFamily::Round, self.cfg.n).and_then(|m| {
            let psi = arclength(&m).iter().map(|r| r.sin()).collect();
            killing_residual(&m, &AngularField::new(psi))
        });
        vec![match measured {
            Ok(k) => below(name, (k - oracle).abs(), limit),
            Err(e) => failed(name, limit, e),
        }]
    }

    fn fixed_point(&self) -> Vec<Invariant> {
        let limit = self.tol.fixed_point;
        let name = "fixed_point_drift";
        let drift = || -> ricci_core::Result<f64> {
            let m = make_profile(ProfileFamily::Round, self.cfg.flow_n)?;
            let dt = stable_dt(&m)?;
            let mut state = FlowState::new(m.clone());
            for _ in 0..self.cfg.fixed_point_steps {
                state = step(&state, dt, FlowMode::Normalized)?;
            }
            Ok(state
                .metric
                .h()
                .iter()
                .zip(m.h())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max))
        };
        vec![match drift() {
            Ok(d) => below(name, d, limit),
            Err(e) => failed(name, limit, e),
        }]
    }

    fn normalized_flow(&self) -> Vec<Invariant> {
        let tol = self.tol;
        let names = [
            ("normalized_flow_ratio", tol.flow_ratio),
            ("normalized_flow_area_drift", tol.flow_area),
            ("normalized_flow_curvature", tol.flow_curvature),
            ("entropy_increase", tol.entropy_increase),
            ("entropy_round", tol.entropy_round),
        ];
        let measured = || -> ricci_core::Result<Vec<f64>> {
            let m = make_profile(ProfileFamily::Perturbed { eps: 0.3, k: 1 }, self.cfg.flow_n)?;
            let area0 = area(&m);
            let flow = ricci_core::run(m, &FlowConfig::default())?;
            let last = flow.last_record();
            let ratio = match flow.outcome {
                FlowOutcome::Converged => last.ratio.map_or(f64::NAN, |r| r - 1.0),
                _ => f64::NAN,
            };
            let drift = (last.area - area0).abs() / area0;
            // Rescale to area 4π; curvature scales by the inverse factor.
            let scale = area(&flow.state.metric) / (4.0 * PI);
            let k = geometry::curvature(&flow.state.metric)?;
            let sup_k = k
                .values
                .iter()
                .map(|k| (k * scale - 1.0).abs())
                .fold(0.0, f64::max);
            let entropies: Vec<f64> = flow.records.iter().filter_map(|r| r.entropy).collect();
            let increase = entropies
                .windows(2)
                .map(|w| (w[1] - w[0]) / w[0].abs())
                .reduce(f64::max)
                .unwrap_or(f64::NAN);
            let round = make_profile(ProfileFamily::Round, self.cfg.n)?;
            let n_round = entropy(&round)?.unwrap_or(f64::NAN);
            Ok(vec![
                ratio,
                drift,
                sup_k,
                increase,
                (n_round - 8.0 * PI * LN_2).abs(),
            ])
        };
        match measured() {
            Ok(v) => names
                .iter()
                .zip(v)
                .map(|((n, l), m)| below(*n, m, *l))
                .collect(),
            Err(e) => names
                .iter()
                .map(|(n, l)| failed(*n, *l, e.clone()))
                .collect(),
        }
    }

    fn area_law(&self) -> Vec<Invariant> {
        let tol = self.tol;
        let names = [
            ("area_law_slope", tol.area_slope),
            ("extinction_time", tol.extinction_time),
        ];
        let measured = || -> ricci_core::Result<Vec<f64>> {
            let m = make_profile(ProfileFamily::Round, self.cfg.extinction_n)?;
            let config = FlowConfig {
                mode: FlowMode::Unnormalized,
                t_end: 0.6,
                record_every: 1000,
                ..FlowConfig::default()
            };
            let flow = ricci_core::run(m, &config)?;
            let (t, a): (Vec<f64>, Vec<f64>) = flow.records.iter().map(|r| (r.t, r.area)).unzip();
            let slope = linear_slope(&t, &a);
            let t_ext = match flow.outcome {
                FlowOutcome::Extinct => flow.state.t,
                _ => f64::NAN,
            };
            Ok(vec![(slope / (-8.0 * PI) - 1.0).abs(), (t_ext - 0.5).abs()])
        };
        match measured() {
            Ok(v) => names
                .iter()
                .zip(v)
                .map(|((n, l), m)| below(*n, m, *l))
                .collect(),
            Err(e) => names
                .iter()
                .map(|(n, l)| failed(*n, *l, e.clone()))
                .collect(),
        }
    }
}

fn resolve(args: &VerifyArgs) -> Result<VerifyConfig, Failure> {
    let mut cfg: VerifyConfig = config::load(args.config.as_deref())?;
    overlay!(cfg, args; n, flow_n, extinction_n, fixed_point_steps, step);
    overlay_opt!(cfg, args; inject_fault, out);
    for n in [coarser(coarser(cfg.n)), cfg.flow_n, cfg.extinction_n] {
        RadialGrid::new(n).map_err(Failure::invalid)?;
    }
    RadialGrid::new(cfg.n).map_err(Failure::invalid)?;
    ShootConfig {
        step: 0.5 * cfg.step,
        ..ShootConfig::default()
    }
    .validate()
    .map_err(Failure::invalid)?;
    config::check_parent(cfg.out.as_ref())?;
    Ok(cfg)
}

pub fn run(args: VerifyArgs) -> CmdResult {
    let cfg = resolve(&args)?;
    let suite = Suite {
        cfg: &cfg,
        tol: &cfg.tolerances,
    };
    type Group<'a> = fn(&Suite<'a>) -> Vec<Invariant>;
    let groups: [Group; 7] = [
        Suite::gauss_bonnet,
        Suite::identity,
        Suite::closure,
        Suite::killing_oracle,
        Suite::fixed_point,
        Suite::normalized_flow,
        Suite::area_law,
    ];
    let invariants: Vec<Invariant> = groups
        .par_iter()
        .map(|g| g(&suite))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let failed: Vec<String> = invariants
        .iter()
        .filter(|i| !i.pass)
        .map(|i| i.name.clone())
        .collect();
    for name in &failed {
        eprintln!("invariant failed: {name}");
    }
    let pass = failed.is_empty();
    let report = Report {
        n: cfg.n,
        flow_n: cfg.flow_n,
        extinction_n: cfg.extinction_n,
        step: Sci(cfg.step),
        fault: cfg.inject_fault,
        invariants,
        failed,
        pass,
    };
    emit(&report, cfg.out.as_deref())?;
    Ok(if pass { Exit::Ok } else { Exit::Numerical })
}
