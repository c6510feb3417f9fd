//! Killing and conformal residuals in the rotationally symmetric gauge.
//!
//! For `X = ψ(r) ∂θ` on `dr² + h² dθ²` the only nonzero component of the
//! Lie derivative of the metric is `(L_X g)_{rθ} = h² ψ_r`, so `X` is
//! Killing iff `ψ` is constant. The rotated gradient of a radial potential
//! is `J∇f = (f_r / h) ∂θ` with the convention `J ∂r = (1/h) ∂θ`; the other
//! orientation flips the sign of `ψ` and leaves every residual unchanged.
//! `∇f` is conformal iff `f_rr = h_r f_r / h`.
//!
//! Residual sups skip nodes with `h ≤ 1e-3·max h` except at the poles,
//! where the regularized limits are used.

use crate::error::{Error, Result};
use crate::geometry::{self, WarpedMetric};
use crate::soliton::{angular_hessian, check_pole_gradient, PotentialProfile};

/// Nodes with `h` below this fraction of `max h` are left out of sups.
pub const WINDOW_FRACTION: f64 = 1e-3;

/// Below this `Σ h²` a least-squares fit of `f_r = a h` is rejected.
pub const FIT_FLOOR: f64 = 1e-24;

/// Coefficient of a rotational vector field `ψ(r) ∂θ`, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularField {
    pub psi: Vec<f64>,
}

impl AngularField {
    pub fn new(psi: Vec<f64>) -> Self {
        AngularField { psi }
    }

    /// The rigid rotation `∂θ`.
    pub fn rotation(n: usize) -> Self {
        AngularField { psi: vec![1.0; n] }
    }
}

fn window(metric: &WarpedMetric) -> impl Iterator<Item = usize> + '_ {
    let h = metric.h();
    let floor = WINDOW_FRACTION * h.iter().copied().fold(0.0, f64::max);
    (1..h.len() - 1).filter(move |&i| h[i] > floor)
}

fn check_len(metric: &WarpedMetric, len: usize) -> Result<()> {
    if len != metric.len() {
        return Err(Error::LengthMismatch {
            expected: metric.len(),
            got: len,
        });
    }
    Ok(())
}

/// `sup |h² ψ_r|` over the interior window.
pub fn killing_residual(metric: &WarpedMetric, field: &AngularField) -> Result<f64> {
    check_len(metric, field.psi.len())?;
    let (psi_r, _) = geometry::radial_derivatives(metric, &field.psi);
    let h = metric.h();
    Ok(window(metric)
        .map(|i| (h[i] * h[i] * psi_r[i]).abs())
        .fold(0.0, f64::max))
}

/// `ψ = f_r / h` with the pole limits `f_rr / h_r`.
pub fn rotated_gradient(metric: &WarpedMetric, f: &PotentialProfile) -> Result<AngularField> {
    check_len(metric, f.f_r.len())?;
    check_pole_gradient(metric, f)?;
    let (h_r, _) = geometry::radial_derivatives(metric, metric.h());
    let (f_rr, _) = geometry::radial_derivatives(metric, &f.f_r);
    let n = metric.len();
    let h = metric.h();
    let psi = (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                f_rr[i] / h_r[i]
            } else {
                f.f_r[i] / h[i]
            }
        })
        .collect();
    Ok(AngularField { psi })
}

/// Killing residual of `J∇f`; vanishes iff `f_r = a·h` for a constant `a`.
pub fn killing_residual_of_potential(metric: &WarpedMetric, f: &PotentialProfile) -> Result<f64> {
    let field = rotated_gradient(metric, f)?;
    killing_residual(metric, &field)
}

/// Nodal `f_rr − h_r f_r / h`; zero at the poles by the regularized limit.
pub fn conformal_defects(metric: &WarpedMetric, f: &PotentialProfile) -> Result<Vec<f64>> {
    check_len(metric, f.f_r.len())?;
    check_pole_gradient(metric, f)?;
    Ok(raw_conformal_defects(metric, f))
}

fn raw_conformal_defects(metric: &WarpedMetric, f: &PotentialProfile) -> Vec<f64> {
    let (h_r, _) = geometry::radial_derivatives(metric, metric.h());
    let (f_rr, _) = geometry::radial_derivatives(metric, &f.f_r);
    let angular = angular_hessian(metric, f, &h_r, &f_rr);
    f_rr.iter().zip(&angular).map(|(a, b)| a - b).collect()
}

/// `sup |f_rr − h_r f_r / h|` over the window and the regularized poles.
pub fn conformal_residual(metric: &WarpedMetric, f: &PotentialProfile) -> Result<f64> {
    let d = conformal_defects(metric, f)?;
    Ok(window(metric).map(|i| d[i].abs()).fold(0.0, f64::max))
}

/// Conformal residual restricted to interior nodes with arclength in
/// `[r_lo, r_hi]`. Pole behaviour of `f` is not checked, so potentials
/// that are singular at the poles can still be probed away from them.
pub fn conformal_residual_between(
    metric: &WarpedMetric,
    f: &PotentialProfile,
    r_lo: f64,
    r_hi: f64,
) -> Result<f64> {
    check_len(metric, f.f_r.len())?;
    if !(r_lo <= r_hi) {
        return Err(Error::InvalidParameter(format!(
            "empty window [{r_lo}, {r_hi}]"
        )));
    }
    let r = geometry::arclength(metric);
    let d = raw_conformal_defects(metric, f);
    let n = metric.len();
    Ok((1..n - 1)
        .filter(|&i| r[i] >= r_lo && r[i] <= r_hi)
        .map(|i| d[i].abs())
        .fold(0.0, f64::max))
}

/// Least-squares `a` in `f_r ≈ a·h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientFit {
    pub a: f64,
    /// `sup |f_r − a·h|` over the interior.
    pub fit_residual: f64,
}

pub fn extract_a(metric: &WarpedMetric, f: &PotentialProfile) -> Result<GradientFit> {
    check_len(metric, f.f_r.len())?;
    let h = metric.h();
    let n = h.len();
    let (num, den) = (1..n - 1).fold((0.0, 0.0), |(num, den), i| {
        (num + f.f_r[i] * h[i], den + h[i] * h[i])
    });
    if den < FIT_FLOOR {
        return Err(Error::DegenerateFit(den));
    }
    let a = num / den;
    let fit_residual = (1..n - 1)
        .map(|i| (f.f_r[i] - a * h[i]).abs())
        .fold(0.0, f64::max);
    Ok(GradientFit { a, fit_residual })
}
