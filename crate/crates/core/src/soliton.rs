//! Shrinking-soliton shooting in the rotationally symmetric gauge.
//!
//! With `c = 1` and `f' = a·h` the soliton equations on `dr² + h² dθ²`
//! reduce to the single ODE `h'' = −h(1 + a·h')`. Starting from the smooth
//! pole `h(0) = 0, h'(0) = 1`, a closed surface needs the first zero `A`
//! of `h` to satisfy `h'(A) = −1`. Multiplying by `h h'` and integrating
//! gives
//!
//! ```text
//! −½ h'(r)² |₀^A = ½ h(r)² |₀^A + a ∫₀^A h (h')² dr
//! ```
//!
//! so `h'(A)² = 1 − 2aI` and closure forces `a = 0` whenever `I > 0`.

use std::f64::consts::PI;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::geometry::{self, WarpedMetric};
use crate::quadrature::cumulative;

/// Smallest `|h'|` accepted in the Newton polish of the closure radius.
const ZERO_SLOPE_FLOOR: f64 = 1e-300;

/// Bisection on the dense output stops below this width in `r`.
pub const ZERO_TOL: f64 = 1e-12;

/// `f_r` at a pole is treated as zero below this, relative to `max(1, max|f_r|)`.
pub const POTENTIAL_POLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootConfig {
    /// Fixed RK4 step in `r`.
    pub step: f64,
    /// Give up if `h` has not returned to zero by this radius.
    pub r_max: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            step: 1e-4,
            r_max: 4.0 * PI,
        }
    }
}

impl ShootConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidParameter(format!("shoot step {}", self.step)));
        }
        if !(self.r_max.is_finite() && self.r_max > self.step) {
            return Err(Error::InvalidParameter(format!(
                "shoot r_max {}",
                self.r_max
            )));
        }
        Ok(())
    }
}

/// Sampled `(r, h, h')` along one shot; the last sample sits at the
/// closure radius when the shot hit zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub h_prime: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult {
    pub a: f64,
    /// First zero of `h`.
    pub closure_radius: Option<f64>,
    pub h_prime_at_end: Option<f64>,
    /// `|h'(A) + 1|`.
    pub closure_defect: Option<f64>,
    pub hit_zero: bool,
    pub profile: Trajectory,
    /// Full-precision `(h, h')` aligned with `profile`.
    states: Vec<(Dd, Dd)>,
}

type State = (Dd, Dd);

#[inline]
fn rhs(a: f64, (h, p): State) -> State {
    (p, -(h * (p * a + 1.0)))
}

#[inline]
fn axpy(y: State, c: f64, k: State) -> State {
    (y.0 + k.0 * c, y.1 + k.1 * c)
}

fn rk4(a: f64, y: State, dr: f64) -> State {
    let k1 = rhs(a, y);
    let k2 = rhs(a, axpy(y, 0.5 * dr, k1));
    let k3 = rhs(a, axpy(y, 0.5 * dr, k2));
    let k4 = rhs(a, axpy(y, dr, k3));
    let c = dr / 6.0;
    (
        y.0 + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * c,
        y.1 + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * c,
    )
}

/// Cubic Hermite value and slope on one step of length `dr`, at fraction
/// `t` of the way from `y0` to `y1`.
fn hermite(a: f64, dr: f64, y0: State, y1: State, t: f64) -> State {
    let t2 = t * t;
    let t3 = t2 * t;
    let b00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let b10 = (t3 - 2.0 * t2 + t) * dr;
    let b01 = -2.0 * t3 + 3.0 * t2;
    let b11 = (t3 - t2) * dr;
    let h = y0.0 * b00 + y0.1 * b10 + y1.0 * b01 + y1.1 * b11;
    // h' interpolated from (h', h'') at the ends.
    let (q0, q1) = (rhs(a, y0).1, rhs(a, y1).1);
    let p = y0.1 * b00 + q0 * b10 + y1.1 * b01 + q1 * b11;
    (h, p)
}

/// Integrates `h'' = −h(1 + a h')` from the smooth pole and locates the
/// first interior zero of `h`.
///
/// The state is carried in double-double arithmetic.
pub fn shoot(a: f64, config: &ShootConfig) -> Result<ShootResult> {
    config.validate()?;
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "shooting parameter a = {a}"
        )));
    }
    let dr = config.step;
    let mut y: State = (Dd::ZERO, Dd::ONE);
    let mut states = vec![y];
    let mut rs = vec![0.0];
    let mut k = 0usize;
    let closure = loop {
        let r = k as f64 * dr;
        let r_next = (k + 1) as f64 * dr;
        if r_next > config.r_max {
            break None;
        }
        let y1 = rk4(a, y, dr);
        if !(y1.0.is_finite() && y1.1.is_finite()) {
            return Err(Error::Blowup { last_r: r });
        }
        if y1.0 <= Dd::ZERO {
            let tau = if y1.0 == Dd::ZERO {
                dr
            } else {
                polish_zero(a, dr, y, y1)
            };
            let end = rk4(a, y, tau);
            rs.push(r + tau);
            states.push(end);
            break Some(end);
        }
        y = y1;
        k += 1;
        rs.push(r_next);
        states.push(y);
    };
    let profile = Trajectory {
        r: rs.clone(),
        h: states.iter().map(|s| s.0.to_f64()).collect(),
        h_prime: states.iter().map(|s| s.1.to_f64()).collect(),
    };
    let (closure_radius, h_prime_at_end, closure_defect) = match closure {
        Some((_, p)) => (
            rs.last().copied(),
            Some(p.to_f64()),
            Some((p + 1.0).abs().to_f64()),
        ),
        None => (None, None, None),
    };
    Ok(ShootResult {
        a,
        closure_radius,
        h_prime_at_end,
        closure_defect,
        hit_zero: closure.is_some(),
        profile,
        states,
    })
}

/// Offset `τ ∈ (0, dr]` of the zero of `h` past `y0`: bisection on the
/// Hermite dense output, then Newton on exact partial RK4 steps.
fn polish_zero(a: f64, dr: f64, y0: State, y1: State) -> f64 {
    let (mut lo, mut hi) = (0.0f64, dr);
    while hi - lo > ZERO_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hermite(a, dr, y0, y1, mid / dr).0 > Dd::ZERO {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..2 {
        let (hz, pz) = rk4(a, y0, tau);
        if pz.abs().to_f64() < ZERO_SLOPE_FLOOR {
            break;
        }
        let next = tau - (hz / pz).to_f64();
        if next > 0.0 && next <= dr {
            tau = next;
        }
    }
    tau
}

impl ShootResult {
    fn require_closure(&self) -> Result<(f64, f64)> {
        match (self.closure_radius, self.h_prime_at_end) {
            (Some(r), Some(p)) => Ok((r, p)),
            _ => Err(Error::NoClosure {
                a: self.a,
                r_max: self.profile.r.last().copied().unwrap_or(0.0),
            }),
        }
    }

    /// `I = ∫₀^A h (h')² dr` over the stored trajectory.
    ///
    /// Composite Simpson on the uniform steps (with a 3/8 panel when the
    /// step count is odd) plus three-point Gauss–Legendre on the final
    /// partial step using the Hermite dense output.
    pub fn correction_integral(&self) -> Result<f64> {
        Ok(self.correction_integral_dd()?.to_f64())
    }

    fn correction_integral_dd(&self) -> Result<Dd> {
        self.require_closure()?;
        let st = &self.states;
        let m = st.len() - 2;
        let integrand = |y: State| y.0 * y.1 * y.1;
        let f: Vec<Dd> = st[..=m].iter().map(|&y| integrand(y)).collect();
        let dr = if m > 0 { self.profile.r[1] } else { 0.0 };
        let uniform = match m {
            0 => Dd::ZERO,
            1 => (f[0] + f[1]) * (0.5 * dr),
            2 => (f[0] + f[1] * 4.0 + f[2]) * (dr / 3.0),
            _ => {
                let simpson_end = if m.is_multiple_of(2) { m } else { m - 3 };
                let mut odd = Dd::ZERO;
                let mut even = Dd::ZERO;
                for (i, fi) in f.iter().enumerate().take(simpson_end).skip(1) {
                    if i % 2 == 1 {
                        odd += *fi;
                    } else {
                        even += *fi;
                    }
                }
                let mut total = (f[0] + f[simpson_end] + odd * 4.0 + even * 2.0) * (dr / 3.0);
                if m % 2 == 1 {
                    total += (f[m - 3] + (f[m - 2] + f[m - 1]) * 3.0 + f[m]) * (3.0 * dr / 8.0);
                }
                total
            }
        };
        let tau = self.profile.r[m + 1] - self.profile.r[m];
        let tail = if tau > 0.0 {
            // Dense output of the full step that overshot the zero.
            let y0 = st[m];
            let full = rk4(self.a, y0, dr);
            let half = 0.5 * tau;
            let gauss = [
                (-(0.6f64).sqrt(), 5.0 / 9.0),
                (0.0, 8.0 / 9.0),
                ((0.6f64).sqrt(), 5.0 / 9.0),
            ];
            let mut acc = Dd::ZERO;
            for (x, w) in gauss {
                let t = (half + half * x) / dr;
                acc += integrand(hermite(self.a, dr, y0, full, t)) * w;
            }
            acc * half
        } else {
            Dd::ZERO
        };
        Ok(uniform + tail)
    }

    /// Dense-output samples of the closed profile on an arclength grid,
    /// as a metric `A² ds² + h² dθ²`.
    pub fn closed_profile(&self, n: usize) -> Result<WarpedMetric> {
        let (total, _) = self.require_closure()?;
        let grid = geometry::RadialGrid::new(n)?;
        let rs = &self.profile.r;
        let last = rs.len() - 1;
        let mut h = Vec::with_capacity(n);
        for s in grid.coords() {
            let r = total * s;
            let j = rs.partition_point(|&x| x <= r).clamp(1, last) - 1;
            let v = if r == rs[j] {
                self.states[j].0
            } else {
                let dr = rs[j + 1] - rs[j];
                hermite(
                    self.a,
                    dr,
                    self.states[j],
                    self.states[j + 1],
                    (r - rs[j]) / dr,
                )
                .0
            };
            h.push(v.to_f64());
        }
        h[0] = 0.0;
        h[n - 1] = 0.0;
        WarpedMetric::from_arclength(total, h)
    }
}

/// Both sides of the energy identity for one closed shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub a: f64,
    /// `−(h'(A)² − h'(0)²)/2`.
    pub lhs: f64,
    /// `(h(A)² − h(0)²)/2`; zero up to the zero-polish error.
    pub rhs_boundary: f64,
    /// `∫₀^A h (h')² dr`.
    pub correction_integral: f64,
    /// `lhs − (rhs_boundary + a·I)`.
    pub residual: f64,
}

pub fn identity_report(result: &ShootResult) -> Result<IdentityReport> {
    result.require_closure()?;
    let (h0, p0) = result.states[0];
    let (h_end, p_end) = *result.states.last().unwrap();
    let lhs = -(p_end.square() - p0.square()) * 0.5;
    let rhs_boundary = (h_end.square() - h0.square()) * 0.5;
    let i = result.correction_integral_dd()?;
    let residual = lhs - (rhs_boundary + i * result.a);
    Ok(IdentityReport {
        a: result.a,
        lhs: lhs.to_f64(),
        rhs_boundary: rhs_boundary.to_f64(),
        correction_integral: i.to_f64(),
        residual: residual.to_f64(),
    })
}

/// Closure defect implied by the identity: `1 − √(1 − 2aI)` for `a ≥ 0`,
/// `√(1 + 2|a|I) − 1` for `a < 0`.
pub fn reconstructed_defect(a: f64, correction_integral: f64) -> f64 {
    let x = 2.0 * a * correction_integral;
    if a >= 0.0 {
        1.0 - (1.0 - x).max(0.0).sqrt()
    } else {
        (1.0 - x).sqrt() - 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureSolution {
    pub a_star: f64,
    pub result: ShootResult,
    /// The minimizer sits within `tol` of a bracket end, so the bracket did
    /// not contain an interior minimum.
    pub at_boundary: bool,
    pub evaluations: usize,
}

/// Minimizes the closure defect over `[a_lo, a_hi]` by golden-section
/// search until the bracket is narrower than `tol`.
///
/// Only interior points are probed, so a bracket end whose shot never
/// closes (such as `a = −1`, where `h' ≡ 1`) is harmless.
pub fn solve_closure(
    a_lo: f64,
    a_hi: f64,
    tol: f64,
    config: &ShootConfig,
) -> Result<ClosureSolution> {
    if !(a_lo.is_finite() && a_hi.is_finite() && a_lo < a_hi) {
        return Err(Error::NotBracketed { lo: a_lo, hi: a_hi });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("closure tolerance {tol}")));
    }
    let mut evaluations = 0usize;
    let mut defect = |a: f64| -> Result<f64> {
        evaluations += 1;
        let res = shoot(a, config)?;
        res.closure_defect.ok_or(Error::NoClosure {
            a,
            r_max: config.r_max,
        })
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a_lo, a_hi);
    if hi - lo > tol {
        let mut c = hi - inv_phi * (hi - lo);
        let mut d = lo + inv_phi * (hi - lo);
        let mut fc = defect(c)?;
        let mut fd = defect(d)?;
        while hi - lo > tol {
            if fc <= fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - inv_phi * (hi - lo);
                fc = defect(c)?;
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + inv_phi * (hi - lo);
                fd = defect(d)?;
            }
        }
    }
    let a_star = 0.5 * (lo + hi);
    let result = shoot(a_star, config)?;
    evaluations += 1;
    if !result.hit_zero {
        return Err(Error::NoClosure {
            a: a_star,
            r_max: config.r_max,
        });
    }
    let at_boundary = a_hi - a_lo > tol && (a_star - a_lo < tol || a_hi - a_star < tol);
    Ok(ClosureSolution {
        a_star,
        result,
        at_boundary,
        evaluations,
    })
}

/// One row of a shooting sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    pub hit_zero: bool,
    pub closure_radius: Option<f64>,
    pub h_prime_at_end: Option<f64>,
    pub closure_defect: Option<f64>,
    pub correction_integral: Option<f64>,
    pub identity_residual: Option<f64>,
}

/// Shoot and evaluate the identity for one `a`; blowups and open shots
/// become rows with `hit_zero = false`.
pub fn sweep_row(a: f64, config: &ShootConfig) -> Result<SweepRow> {
    config.validate()?;
    let empty = SweepRow {
        a,
        hit_zero: false,
        closure_radius: None,
        h_prime_at_end: None,
        closure_defect: None,
        correction_integral: None,
        identity_residual: None,
    };
    let res = match shoot(a, config) {
        Ok(res) if res.hit_zero => res,
        Ok(_) | Err(Error::Blowup { .. }) => return Ok(empty),
        Err(e) => return Err(e),
    };
    let report = identity_report(&res)?;
    Ok(SweepRow {
        hit_zero: true,
        closure_radius: res.closure_radius,
        h_prime_at_end: res.h_prime_at_end,
        closure_defect: res.closure_defect,
        correction_integral: Some(report.correction_integral),
        identity_residual: Some(report.residual),
        ..empty
    })
}

/// Sampled soliton potential with `f(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    pub f: Vec<f64>,
    /// Arclength derivative `df/dr`.
    pub f_r: Vec<f64>,
}

impl PotentialProfile {
    /// Builds a profile from nodal `f` and `f_r` sampled on `metric`'s grid.
    pub fn new(metric: &WarpedMetric, f: Vec<f64>, f_r: Vec<f64>) -> Result<Self> {
        for v in [&f, &f_r] {
            if v.len() != metric.len() {
                return Err(Error::LengthMismatch {
                    expected: metric.len(),
                    got: v.len(),
                });
            }
        }
        Ok(PotentialProfile { f, f_r })
    }

    /// Profile from `f_r` alone, with `f` by quadrature from the first pole.
    pub fn from_gradient(metric: &WarpedMetric, f_r: Vec<f64>) -> Result<Self> {
        if f_r.len() != metric.len() {
            return Err(Error::LengthMismatch {
                expected: metric.len(),
                got: f_r.len(),
            });
        }
        let integrand: Vec<f64> = f_r.iter().zip(metric.phi()).map(|(d, p)| d * p).collect();
        let f = cumulative(&integrand, metric.grid().spacing());
        Ok(PotentialProfile { f, f_r })
    }

    pub fn zero(metric: &WarpedMetric) -> Self {
        PotentialProfile {
            f: vec![0.0; metric.len()],
            f_r: vec![0.0; metric.len()],
        }
    }
}

/// The potential with `f' = a·h` and `f(0) = 0`.
pub fn potential_from_a(metric: &WarpedMetric, a: f64) -> PotentialProfile {
    let f_r: Vec<f64> = metric.h().iter().map(|h| a * h).collect();
    PotentialProfile::from_gradient(metric, f_r).expect("gradient sampled on the metric grid")
}

/// Checks that `f_r` vanishes at both poles so `f_r / h` has a limit.
pub(crate) fn check_pole_gradient(metric: &WarpedMetric, f: &PotentialProfile) -> Result<()> {
    let n = metric.len();
    let scale = f.f_r.iter().map(|v| v.abs()).fold(1.0, f64::max);
    for (i, s) in [(0usize, 0.0), (n - 1, 1.0)] {
        if f.f_r[i].abs() > POTENTIAL_POLE_TOL * scale {
            return Err(Error::PotentialAtPole { s, value: f.f_r[i] });
        }
    }
    Ok(())
}

/// Nodal values of `h_r f_r / h`, the `θθ` Hessian term, with the pole
/// limit `f_rr`.
pub(crate) fn angular_hessian(
    metric: &WarpedMetric,
    f: &PotentialProfile,
    h_r: &[f64],
    f_rr: &[f64],
) -> Vec<f64> {
    let n = metric.len();
    let h = metric.h();
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                f_rr[i]
            } else {
                h_r[i] * f.f_r[i] / h[i]
            }
        })
        .collect()
}

/// Residuals of `K = c + f_rr` and `K = c + h_r f_r / h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonResiduals {
    pub radial: Vec<f64>,
    pub angular: Vec<f64>,
}

impl SolitonResiduals {
    pub fn sup(&self) -> f64 {
        self.radial
            .iter()
            .chain(&self.angular)
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Nodal residuals of the gradient soliton equation `Ric = c g + ∇²f`.
pub fn soliton_residuals(
    metric: &WarpedMetric,
    f: &PotentialProfile,
    c: f64,
) -> Result<SolitonResiduals> {
    check_pole_gradient(metric, f)?;
    let k = geometry::curvature(metric)?;
    let (h_r, _) = geometry::radial_derivatives(metric, metric.h());
    let (f_rr, _) = geometry::radial_derivatives(metric, &f.f_r);
    let angular_term = angular_hessian(metric, f, &h_r, &f_rr);
    let radial = k.values.iter().zip(&f_rr).map(|(k, d)| k - c - d).collect();
    let angular = k
        .values
        .iter()
        .zip(&angular_term)
        .map(|(k, d)| k - c - d)
        .collect();
    Ok(SolitonResiduals { radial, angular })
}

/// `sup |K − K̄|` with `K̄` the area-weighted mean curvature.
pub fn einstein_defect(metric: &WarpedMetric) -> Result<f64> {
    let k = geometry::curvature(metric)?;
    let mean = geometry::integrate_area(metric, &k.values) / geometry::area(metric);
    Ok(k.values
        .iter()
        .map(|k| (k - mean).abs())
        .fold(0.0, f64::max))
}
