//! Ricci flow of rotationally symmetric metrics.
//!
//! In two dimensions `∂g/∂t = (r̄ − R) g` acts on each metric coefficient
//! separately, so in the fixed `s` gauge the flow is the pair
//! `∂φ/∂t = ½(r̄ − R)φ`, `∂h/∂t = ½(r̄ − R)h` with `R = 2K`. The
//! unnormalized flow drops `r̄`. Time stepping is classical fourth-order
//! Runge–Kutta with curvature recomputed at every stage.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{self, CurvatureOperator, MetricDerivatives, WarpedMetric};
use crate::quadrature::simpson;

/// Courant-type factor in the explicit step bound.
pub const STABILITY_FACTOR: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMode {
    /// Area-preserving flow `∂g/∂t = (r̄ − R) g`.
    Normalized,
    /// Plain flow `∂g/∂t = −R g`.
    Unnormalized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub mode: FlowMode,
    /// Requested step; each step is capped by the stability bound.
    pub dt: f64,
    pub t_end: f64,
    /// Record diagnostics every this many steps.
    pub record_every: usize,
    /// Regrid when `max |log(φ_i / A)|` exceeds this.
    pub regrid_trigger: f64,
    pub convergence_tol: f64,
    /// Unnormalized runs stop as extinct once the area falls below this
    /// fraction of the initial area.
    pub extinction_fraction: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            mode: FlowMode::Normalized,
            dt: 1e-3,
            t_end: 10.0,
            record_every: 100,
            regrid_trigger: 0.1,
            convergence_tol: 1e-2,
            extinction_fraction: 1e-3,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad("t_end must be positive");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        if !(self.regrid_trigger.is_finite() && self.regrid_trigger > 0.0) {
            return bad("regrid_trigger must be positive");
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return bad("convergence_tol must be positive");
        }
        if !(self.extinction_fraction > 0.0 && self.extinction_fraction < 1.0) {
            return bad("extinction_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub metric: WarpedMetric,
    pub t: f64,
}

impl FlowState {
    pub fn new(metric: WarpedMetric) -> Self {
        FlowState { metric, t: 0.0 }
    }
}

/// Scalar diagnostics of one flow state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub area: f64,
    pub k_min: f64,
    pub k_max: f64,
    /// `k_max / k_min`, only when `k_min > 0`.
    pub ratio: Option<f64>,
    pub gb_defect: f64,
    pub entropy: Option<f64>,
    pub r_bar: f64,
}

/// Average scalar curvature with its Gauss–Bonnet cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanScalarCurvature {
    /// `∫ R dA / Area`.
    pub value: f64,
    /// `8π / Area`.
    pub topological: f64,
    pub discrepancy: f64,
}

pub fn mean_scalar_curvature(metric: &WarpedMetric) -> Result<MeanScalarCurvature> {
    let k = geometry::curvature(metric)?;
    Ok(mean_from(metric, &k.values))
}

fn mean_from(metric: &WarpedMetric, k: &[f64]) -> MeanScalarCurvature {
    let area = geometry::area(metric);
    let r: Vec<f64> = k.iter().map(|k| 2.0 * k).collect();
    let value = geometry::integrate_area(metric, &r) / area;
    let topological = 8.0 * PI / area;
    MeanScalarCurvature {
        value,
        topological,
        discrepancy: value - topological,
    }
}

/// `∫ R log R dA`, defined only when `R > 0` at every node.
pub fn entropy(metric: &WarpedMetric) -> Result<Option<f64>> {
    let k = geometry::curvature(metric)?;
    Ok(entropy_from(metric, &k.values))
}

fn entropy_from(metric: &WarpedMetric, k: &[f64]) -> Option<f64> {
    if k.iter().any(|&k| k <= 0.0) {
        return None;
    }
    let integrand: Vec<f64> = k.iter().map(|k| 2.0 * k * (2.0 * k).ln()).collect();
    Some(geometry::integrate_area(metric, &integrand))
}

pub fn diagnostics(state: &FlowState) -> Result<DiagnosticsRecord> {
    let m = &state.metric;
    let k = geometry::curvature(m)?;
    let (k_min, k_max) = (k.min(), k.max());
    Ok(DiagnosticsRecord {
        t: state.t,
        area: geometry::area(m),
        k_min,
        k_max,
        ratio: (k_min > 0.0).then(|| k_max / k_min),
        gb_defect: geometry::gauss_bonnet_from(m, &k),
        entropy: entropy_from(m, &k.values),
        r_bar: mean_from(m, &k.values).value,
    })
}

/// Constant curvature to within `tol`, with a consistent Gauss–Bonnet sum.
pub fn converged(record: &DiagnosticsRecord, tol: f64) -> bool {
    match record.ratio {
        Some(ratio) => {
            record.k_min > 0.0 && ratio - 1.0 < tol && record.gb_defect.abs() < 10.0 * tol
        }
        None => false,
    }
}

fn min_spacing(phi: &[f64], ds: f64) -> f64 {
    phi.windows(2)
        .map(|w| 0.5 * (w[0] + w[1]) * ds)
        .fold(f64::INFINITY, f64::min)
}

fn stability_limit(phi: &[f64], k: &[f64], ds: f64) -> f64 {
    let dr = min_spacing(phi, ds);
    let k_abs = k.iter().map(|k| k.abs()).fold(1.0, f64::max);
    STABILITY_FACTOR * dr * dr / k_abs
}

/// Largest step allowed by `dt ≤ 0.2·(min dr)²·min(1, 1/max|K|)`.
pub fn stable_dt(metric: &WarpedMetric) -> Result<f64> {
    let k = geometry::curvature(metric)?;
    Ok(stability_limit(
        metric.phi(),
        &k.values,
        metric.grid().spacing(),
    ))
}

/// Scratch space and operators for repeated steps on one grid size.
struct Stepper {
    op: CurvatureOperator,
    derivs: MetricDerivatives,
    ds: f64,
    k: Vec<f64>,
    weights: Vec<f64>,
    stages: [(Vec<f64>, Vec<f64>); 4],
    trial_phi: Vec<f64>,
    trial_h: Vec<f64>,
}

enum StepPolicy {
    Strict,
    Clamp,
}

impl Stepper {
    fn new(metric: &WarpedMetric) -> Self {
        let n = metric.len();
        let z = || (vec![0.0; n], vec![0.0; n]);
        Stepper {
            op: CurvatureOperator::new(metric.grid()),
            derivs: CurvatureOperator::new(metric.grid()).derivatives(metric.phi(), metric.h()),
            ds: metric.grid().spacing(),
            k: vec![0.0; n],
            weights: vec![0.0; n],
            stages: [z(), z(), z(), z()],
            trial_phi: vec![0.0; n],
            trial_h: vec![0.0; n],
        }
    }

    /// Evaluates the flow velocity at `(phi, h)` into stage `slot`.
    fn rhs(&mut self, phi: &[f64], h: &[f64], mode: FlowMode, slot: usize) -> Result<()> {
        for (i, &p) in phi.iter().enumerate() {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidMetric(format!("phi = {p} at node {i}")));
            }
        }
        self.op.derivatives_into(phi, h, &mut self.derivs);
        self.op.curvature_from(phi, h, &self.derivs, &mut self.k)?;
        let r_bar = match mode {
            FlowMode::Normalized => {
                for i in 0..phi.len() {
                    self.weights[i] = phi[i] * h[i];
                }
                let area = simpson(&self.weights, self.ds);
                for i in 0..phi.len() {
                    self.weights[i] *= 2.0 * self.k[i];
                }
                simpson(&self.weights, self.ds) / area
            }
            FlowMode::Unnormalized => 0.0,
        };
        let (dphi, dh) = &mut self.stages[slot];
        let n = phi.len();
        for i in 0..n {
            let rate = 0.5 * (r_bar - 2.0 * self.k[i]);
            dphi[i] = rate * phi[i];
            dh[i] = rate * h[i];
        }
        dh[0] = 0.0;
        dh[n - 1] = 0.0;
        Ok(())
    }

    fn trial(&mut self, phi: &[f64], h: &[f64], slot: usize, c: f64) {
        let (dphi, dh) = &self.stages[slot];
        for i in 0..phi.len() {
            self.trial_phi[i] = phi[i] + c * dphi[i];
            self.trial_h[i] = h[i] + c * dh[i];
        }
    }

    /// One RK4 step; returns the step actually taken.
    fn advance(
        &mut self,
        phi: &mut [f64],
        h: &mut [f64],
        dt: f64,
        mode: FlowMode,
        policy: StepPolicy,
    ) -> Result<f64> {
        self.rhs(phi, h, mode, 0)?;
        let limit = stability_limit(phi, &self.k, self.ds);
        let dt = match policy {
            StepPolicy::Strict if dt > limit => {
                return Err(Error::StabilityViolation { dt, limit })
            }
            StepPolicy::Strict => dt,
            StepPolicy::Clamp => dt.min(limit),
        };
        for (slot, c) in [(1usize, 0.5 * dt), (2, 0.5 * dt), (3, dt)] {
            self.trial(phi, h, slot - 1, c);
            let (tp, th) = (
                std::mem::take(&mut self.trial_phi),
                std::mem::take(&mut self.trial_h),
            );
            let res = self.rhs(&tp, &th, mode, slot);
            self.trial_phi = tp;
            self.trial_h = th;
            res?;
        }
        let n = phi.len();
        for i in 0..n {
            let s = &self.stages;
            phi[i] += dt / 6.0 * (s[0].0[i] + 2.0 * s[1].0[i] + 2.0 * s[2].0[i] + s[3].0[i]);
            h[i] += dt / 6.0 * (s[0].1[i] + 2.0 * s[1].1[i] + 2.0 * s[2].1[i] + s[3].1[i]);
        }
        h[0] = 0.0;
        h[n - 1] = 0.0;
        if let Some(i) = (1..n - 1).find(|&i| !(h[i] > 0.0)) {
            return Err(Error::NonPositiveRadius {
                index: i,
                value: h[i],
            });
        }
        Ok(dt)
    }
}

fn reject(t: f64, e: Error) -> Error {
    match e {
        e @ Error::StabilityViolation { .. } => e,
        other => Error::StepRejected {
            t,
            reason: other.to_string(),
        },
    }
}

/// One explicit RK4 step of size `dt`.
///
/// Fails with [`Error::StabilityViolation`] when `dt` exceeds
/// [`stable_dt`], and with [`Error::StepRejected`] when a stage produces an
/// invalid metric.
pub fn step(state: &FlowState, dt: f64, mode: FlowMode) -> Result<FlowState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step {dt}")));
    }
    let mut stepper = Stepper::new(&state.metric);
    let (mut phi, mut h) = state.metric.clone().into_parts();
    stepper
        .advance(&mut phi, &mut h, dt, mode, StepPolicy::Strict)
        .map_err(|e| reject(state.t, e))?;
    let metric = WarpedMetric::new(phi, h).map_err(|e| reject(state.t, e))?;
    Ok(FlowState {
        metric,
        t: state.t + dt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowOutcome {
    /// The curvature ratio fell below the convergence tolerance.
    Converged,
    /// Reached `t_end` without converging.
    Completed,
    /// Unnormalized flow shrank the area below the extinction floor.
    Extinct,
}

/// Diagnostics immediately before and after one regrid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegridEvent {
    pub before: DiagnosticsRecord,
    pub after: DiagnosticsRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub state: FlowState,
    pub records: Vec<DiagnosticsRecord>,
    pub outcome: FlowOutcome,
    pub regrids: Vec<RegridEvent>,
    pub steps: usize,
}

impl FlowRun {
    pub fn last_record(&self) -> &DiagnosticsRecord {
        self.records
            .last()
            .expect("a run always records its first state")
    }
}

/// Runs the flow until `t_end`, convergence, or extinction.
///
/// Every step is capped by the stability bound. Diagnostics are recorded at
/// the start, every `record_every` steps, and at the end. Normalized runs
/// stop at the first record that satisfies [`converged`]; unnormalized runs
/// shrink self-similarly and only stop at `t_end` or extinction.
pub fn run(metric: WarpedMetric, config: &FlowConfig) -> Result<FlowRun> {
    run_observed(metric, config, |_, _| Ok(()))
}

/// [`run`] that hands every recorded state to `observe`, for snapshots.
/// An observer error aborts the run unchanged.
pub fn run_observed(
    metric: WarpedMetric,
    config: &FlowConfig,
    mut observe: impl FnMut(&FlowState, &DiagnosticsRecord) -> Result<()>,
) -> Result<FlowRun> {
    config.validate()?;
    let mut stepper = Stepper::new(&metric);
    let n = metric.len();
    let initial_area = geometry::area(&metric);
    let area_floor = config.extinction_fraction * initial_area;
    let mut state = FlowState::new(metric);
    let wrap = |t: f64, e: Error| Error::FlowFailed {
        t,
        source: Box::new(e),
    };

    let first = diagnostics(&state).map_err(|e| wrap(0.0, e))?;
    observe(&state, &first)?;
    let mut records = vec![first];
    let mut regrids = Vec::new();
    let mut steps = 0usize;
    let stops_on_convergence = config.mode == FlowMode::Normalized;
    if stops_on_convergence && converged(&first, config.convergence_tol) {
        return Ok(FlowRun {
            state,
            records,
            outcome: FlowOutcome::Converged,
            regrids,
            steps,
        });
    }

    let outcome = loop {
        if state.t >= config.t_end {
            break FlowOutcome::Completed;
        }
        let t = state.t;
        let remaining = config.t_end - t;
        let (mut phi, mut h) = state.metric.clone().into_parts();
        let taken = stepper
            .advance(
                &mut phi,
                &mut h,
                config.dt.min(remaining),
                config.mode,
                StepPolicy::Clamp,
            )
            .map_err(|e| wrap(t, e))?;
        let metric = WarpedMetric::new(phi, h).map_err(|e| wrap(t, e))?;
        steps += 1;
        state = FlowState {
            metric,
            t: if taken >= remaining {
                config.t_end
            } else {
                t + taken
            },
        };

        if config.mode == FlowMode::Unnormalized && geometry::area(&state.metric) < area_floor {
            break FlowOutcome::Extinct;
        }

        if state.metric.gauge_distortion() > config.regrid_trigger {
            let before = diagnostics(&state).map_err(|e| wrap(state.t, e))?;
            let metric = geometry::regrid(&state.metric, n).map_err(|e| wrap(state.t, e))?;
            state.metric = metric;
            let after = diagnostics(&state).map_err(|e| wrap(state.t, e))?;
            regrids.push(RegridEvent { before, after });
        }

        if steps.is_multiple_of(config.record_every) {
            let rec = diagnostics(&state).map_err(|e| wrap(state.t, e))?;
            observe(&state, &rec)?;
            records.push(rec);
            if stops_on_convergence && converged(&rec, config.convergence_tol) {
                break FlowOutcome::Converged;
            }
        }
    };

    if records.last().map(|r| r.t) != Some(state.t) {
        let rec = diagnostics(&state).map_err(|e| Error::FlowFailed {
            t: state.t,
            source: Box::new(e),
        })?;
        observe(&state, &rec)?;
        records.push(rec);
    }
    Ok(FlowRun {
        state,
        records,
        outcome,
        regrids,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_profile, ProfileFamily};
    use std::f64::consts::LN_2;

    fn round(n: usize) -> WarpedMetric {
        make_profile(ProfileFamily::Round, n).unwrap()
    }

    fn perturbed(eps: f64, n: usize) -> WarpedMetric {
        make_profile(ProfileFamily::Perturbed { eps, k: 1 }, n).unwrap()
    }

    /// `h = sin²(πs)` closes with zero slope, so the pole limit fails.
    fn flat_pole(n: usize) -> WarpedMetric {
        let grid = crate::geometry::RadialGrid::new(n).unwrap();
        let h: Vec<f64> = grid
            .coords()
            .iter()
            .map(|s| (PI * s).sin().powi(2))
            .collect();
        let mut h = h;
        h[0] = 0.0;
        h[n - 1] = 0.0;
        WarpedMetric::new(vec![1.0; n], h).unwrap()
    }

    fn record(k_min: f64, k_max: f64, gb_defect: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t: 0.0,
            area: 1.0,
            k_min,
            k_max,
            ratio: (k_min > 0.0).then(|| k_max / k_min),
            gb_defect,
            entropy: None,
            r_bar: 1.0,
        }
    }

    #[test]
    fn mean_curvature_examples() {
        let m = round(1001);
        assert!((mean_scalar_curvature(&m).unwrap().value - 2.0).abs() < 1e-6);

        let lambda: f64 = 1.7;
        let scaled = m.scaled(lambda).unwrap();
        let r = mean_scalar_curvature(&scaled).unwrap();
        assert!((r.value - 2.0 / (lambda * lambda)).abs() < 1e-6);

        let p = perturbed(0.3, 1001);
        let r = mean_scalar_curvature(&p).unwrap();
        assert!((r.value - 8.0 * PI / geometry::area(&p)).abs() < 1e-5);
        assert!(r.discrepancy.abs() < 1e-5);
        assert_eq!(r.topological, 8.0 * PI / geometry::area(&p));
    }

    #[test]
    fn entropy_examples() {
        let m = round(1001);
        let n = entropy(&m).unwrap().unwrap();
        assert!((n - 8.0 * PI * LN_2).abs() < 1e-4);
        assert!((n - 17.420).abs() < 1e-3);

        // R ≡ 1 after scaling lengths by √2.
        let unit_r = m.scaled(2f64.sqrt()).unwrap();
        assert!(entropy(&unit_r).unwrap().unwrap().abs() < 1e-6);

        assert_eq!(entropy(&perturbed(0.3, 201)).unwrap(), None);
    }

    #[test]
    fn converged_examples() {
        assert!(converged(&record(1.0, 1.0, 0.0), 1e-12));
        assert!(!converged(&record(-0.1, 1.0, 0.0), 1.0));
        assert!(converged(&record(1.0, 1.005, 1e-9), 1e-2));
        assert!(!converged(&record(1.0, 1.005, 0.5), 1e-2));
        assert!(!converged(&record(1.0, 1.02, 0.0), 1e-2));
    }

    #[test]
    fn config_validation() {
        assert!(FlowConfig::default().validate().is_ok());
        let bad = [
            FlowConfig {
                dt: 0.0,
                ..FlowConfig::default()
            },
            FlowConfig {
                t_end: -1.0,
                ..FlowConfig::default()
            },
            FlowConfig {
                record_every: 0,
                ..FlowConfig::default()
            },
            FlowConfig {
                regrid_trigger: 0.0,
                ..FlowConfig::default()
            },
            FlowConfig {
                convergence_tol: f64::NAN,
                ..FlowConfig::default()
            },
            FlowConfig {
                extinction_fraction: 1.0,
                ..FlowConfig::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));
            assert!(run(round(21), &cfg).is_err());
        }
    }

    #[test]
    fn round_sphere_is_stationary() {
        let m = round(101);
        let dt = stable_dt(&m).unwrap();
        let next = step(&FlowState::new(m.clone()), dt, FlowMode::Normalized).unwrap();
        assert_eq!(next.t, dt);
        let drift = next
            .metric
            .h()
            .iter()
            .zip(m.h())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-10);
    }

    #[test]
    fn shrinking_sphere_area() {
        // g(t) = (1 − 2t) g₀, so the area at t = 1/4 is 2π.
        let cfg = FlowConfig {
            mode: FlowMode::Unnormalized,
            t_end: 0.25,
            ..FlowConfig::default()
        };
        let out = run(round(101), &cfg).unwrap();
        assert_eq!(out.outcome, FlowOutcome::Completed);
        assert_eq!(out.state.t, 0.25);
        assert!((geometry::area(&out.state.metric) - 2.0 * PI).abs() < 1e-4);
        // Self-similar: h keeps the shape of sin(πs).
        let factor = 0.5f64.sqrt();
        let m0 = round(101);
        for (h, h0) in out.state.metric.h().iter().zip(m0.h()) {
            assert!((h - factor * h0).abs() < 1e-6);
        }
    }

    #[test]
    fn one_normalized_step_keeps_area() {
        let m = perturbed(0.2, 201);
        let a0 = geometry::area(&m);
        let dt = stable_dt(&m).unwrap();
        let next = step(&FlowState::new(m), dt, FlowMode::Normalized).unwrap();
        assert!((geometry::area(&next.metric) - a0).abs() / a0 < 1e-8);
    }

    #[test]
    fn step_errors() {
        let m = round(101);
        let limit = stable_dt(&m).unwrap();
        let state = FlowState::new(m);
        assert!(matches!(
            step(&state, 2.0 * limit, FlowMode::Normalized),
            Err(Error::StabilityViolation { .. })
        ));
        assert!(matches!(
            step(&state, 0.0, FlowMode::Normalized),
            Err(Error::InvalidParameter(_))
        ));

        let flat = FlowState {
            metric: flat_pole(51),
            t: 0.75,
        };
        match step(&flat, 1e-9, FlowMode::Unnormalized) {
            Err(Error::StepRejected { t, .. }) => assert_eq!(t, 0.75),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn run_failure_names_time() {
        let err = run(flat_pole(51), &FlowConfig::default()).unwrap_err();
        assert!(matches!(err, Error::FlowFailed { t, .. } if t == 0.0));
        assert!(err.to_string().contains("t = 0"));
    }

    #[test]
    fn round_run_converges_at_first_record() {
        let cfg = FlowConfig {
            t_end: 0.1,
            ..FlowConfig::default()
        };
        let out = run(round(1001), &cfg).unwrap();
        assert_eq!(out.outcome, FlowOutcome::Converged);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.steps, 0);
        assert!(out.last_record().ratio.unwrap() - 1.0 < 1e-8);
    }

    #[test]
    fn perturbed_run_converges() {
        let out = run(perturbed(0.3, 101), &FlowConfig::default()).unwrap();
        assert_eq!(out.outcome, FlowOutcome::Converged);
        let last = out.last_record();
        assert!(last.ratio.unwrap() - 1.0 < 1e-2);
        let scale = geometry::area(&out.state.metric) / (4.0 * PI);
        let k = geometry::curvature(&out.state.metric).unwrap();
        assert!(k.values.iter().all(|k| (k * scale - 1.0).abs() < 1e-2));
        assert!(!out.regrids.is_empty());
    }

    #[test]
    fn extinction_is_an_outcome() {
        let cfg = FlowConfig {
            mode: FlowMode::Unnormalized,
            t_end: 0.6,
            record_every: 500,
            ..FlowConfig::default()
        };
        let out = run(round(25), &cfg).unwrap();
        assert_eq!(out.outcome, FlowOutcome::Extinct);
        assert!(out.state.t < 0.5 + 1e-3);
        assert!(out.state.t > 0.49);
    }

    #[test]
    fn records_bracket_the_run() {
        let cfg = FlowConfig {
            t_end: 0.05,
            record_every: 7,
            ..FlowConfig::default()
        };
        let out = run(perturbed(0.1, 51), &cfg).unwrap();
        assert_eq!(out.outcome, FlowOutcome::Completed);
        assert_eq!(out.records[0].t, 0.0);
        assert_eq!(out.last_record().t, 0.05);
        assert_eq!(out.state.t, 0.05);
        assert!(out.records.windows(2).all(|w| w[0].t < w[1].t));
        assert_eq!(
            out.records.len(),
            out.steps / 7 + 1 + usize::from(!out.steps.is_multiple_of(7))
        );
    }

    #[test]
    fn observer_sees_every_record() {
        let cfg = FlowConfig {
            t_end: 0.02,
            record_every: 5,
            ..FlowConfig::default()
        };
        let mut seen = Vec::new();
        let out = run_observed(perturbed(0.1, 51), &cfg, |state, rec| {
            assert_eq!(state.t, rec.t);
            seen.push(rec.t);
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, out.records.iter().map(|r| r.t).collect::<Vec<_>>());

        let err = run_observed(round(21), &cfg, |_, _| Err(Error::Io("full".into()))).unwrap_err();
        assert_eq!(err, Error::Io("full".into()));
    }
}
