//! Rotationally symmetric metrics `φ(s)² ds² + h(s)² dθ²` on the 2-sphere.
//!
//! The radial coordinate `s` is fixed on `[0, 1]` with the poles at the two
//! ends. Arclength is `r = ∫ φ ds`; the arclength gauge is `φ ≡ A`, the
//! total pole-to-pole length. All derivatives are fourth order and all
//! integrals use composite Simpson, so grids must have an odd node count.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::interp::{MonotoneCubic, OddLagrange};
use crate::quadrature::{cumulative, simpson};
use crate::stencil::Stencils;

/// Smallest accepted node count.
pub const MIN_NODES: usize = 9;

/// Pole curvature is `-h_rrr / h_r`; below this `|h_r|` the limit is
/// considered ill-conditioned.
pub const POLE_SLOPE_TOL: f64 = 1e-3;

/// Largest `|eps|` accepted by [`ProfileFamily::Perturbed`].
pub const MAX_PERTURBATION: f64 = 0.9;

/// Largest exponent `k` accepted by [`ProfileFamily::Perturbed`].
pub const MAX_PERTURBATION_POWER: u32 = 32;

/// Nodes per local interpolation stencil in [`regrid`].
pub const REGRID_STENCIL: usize = 8;

/// Uniform grid on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    n: usize,
}

impl RadialGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_NODES || n.is_multiple_of(2) {
            return Err(Error::InvalidGrid { n, min: MIN_NODES });
        }
        Ok(RadialGrid { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            1.0
        } else {
            i as f64 / (self.n - 1) as f64
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn stencils(&self) -> Stencils {
        Stencils::new(self.n, self.spacing())
    }
}

/// A rotationally symmetric metric sampled on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedMetric {
    grid: RadialGrid,
    phi: Vec<f64>,
    h: Vec<f64>,
}

impl WarpedMetric {
    /// Builds a metric after checking positivity of `φ`, positivity of `h`
    /// on the interior and `h = 0` at both poles.
    ///
    /// Slope closure (`dh/dr = ±1` at the poles) is not enforced here; see
    /// [`boundary_defects`] and [`WarpedMetric::is_closed`].
    pub fn new(phi: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let grid = RadialGrid::new(phi.len())?;
        if h.len() != phi.len() {
            return Err(Error::LengthMismatch {
                expected: phi.len(),
                got: h.len(),
            });
        }
        if let Some(i) = phi.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidMetric(format!(
                "phi must be finite and positive, got {} at node {i}",
                phi[i]
            )));
        }
        if let Some(i) = h.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMetric(format!("h is not finite at node {i}")));
        }
        let n = h.len();
        if h[0] != 0.0 || h[n - 1] != 0.0 {
            return Err(Error::InvalidMetric(format!(
                "poles must close with h = 0, got h(0) = {}, h(1) = {}",
                h[0],
                h[n - 1]
            )));
        }
        if let Some(i) = (1..n - 1).find(|&i| h[i] <= 0.0) {
            return Err(Error::NonPositiveRadius {
                index: i,
                value: h[i],
            });
        }
        Ok(WarpedMetric { grid, phi, h })
    }

    /// Arclength-gauge metric `dr² + h(r)² dθ²` with `r = A·s`.
    pub fn from_arclength(total_length: f64, h: Vec<f64>) -> Result<Self> {
        let phi = vec![total_length; h.len()];
        Self::new(phi, h)
    }

    pub fn grid(&self) -> RadialGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.phi, self.h)
    }

    /// The homothetic metric `λ² g`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor {lambda}")));
        }
        Self::new(
            self.phi.iter().map(|p| p * lambda).collect(),
            self.h.iter().map(|v| v * lambda).collect(),
        )
    }

    /// All four closure defects are below `tol`.
    pub fn is_closed(&self, tol: f64) -> bool {
        boundary_defects(self).max_abs() < tol
    }

    /// `max_i |log(φ_i / A)|`: zero exactly in the arclength gauge.
    pub fn gauge_distortion(&self) -> f64 {
        let total = total_length(self);
        let (lo, hi) = self
            .phi
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            });
        (hi / total).ln().abs().max((lo / total).ln().abs())
    }
}

/// Initial-data families on the unit-length-scaled grid, both with `φ ≡ π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileFamily {
    /// Unit round sphere, `h = sin(πs)`.
    Round,
    /// `h = sin(πs)·(1 + eps·sin^{2k}(πs))`.
    Perturbed { eps: f64, k: u32 },
}

pub fn make_profile(family: ProfileFamily, n: usize) -> Result<WarpedMetric> {
    let grid = RadialGrid::new(n)?;
    // measured from the nearer pole
    let s: Vec<f64> = (0..n).map(|i| grid.coord(i.min(n - 1 - i))).collect();
    let mut h: Vec<f64> = s.iter().map(|s| (PI * s).sin()).collect();
    if let ProfileFamily::Perturbed { eps, k } = family {
        if !(eps.is_finite() && eps.abs() < MAX_PERTURBATION) {
            return Err(Error::InadmissibleProfile(format!(
                "perturbation amplitude {eps} must satisfy |eps| < {MAX_PERTURBATION}"
            )));
        }
        if k == 0 || k > MAX_PERTURBATION_POWER {
            return Err(Error::InadmissibleProfile(format!(
                "perturbation power k = {k} must lie in 1..={MAX_PERTURBATION_POWER}"
            )));
        }
        for (hi, si) in h.iter_mut().zip(&s) {
            let base = (PI * si).sin();
            *hi = base * (1.0 + eps * base.powi(2 * k as i32));
        }
    }
    h[0] = 0.0;
    h[n - 1] = 0.0;
    WarpedMetric::new(vec![PI; n], h)
}

/// Pole-to-pole length `A`, equal to the last entry of [`arclength`].
pub fn total_length(metric: &WarpedMetric) -> f64 {
    crate::quadrature::integral(&metric.phi, metric.grid.spacing())
}

/// `r_i = ∫_0^{s_i} φ ds`; the last entry is the total length `A`.
pub fn arclength(metric: &WarpedMetric) -> Vec<f64> {
    cumulative(&metric.phi, metric.grid.spacing())
}

/// Gauss curvature at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub values: Vec<f64>,
}

impl CurvatureField {
    /// The first and last nodes carry the regularized limit `-h_rrr / h_r`.
    pub fn is_pole_regularized(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Raw `s`-derivatives needed by the curvature formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricDerivatives {
    pub h_s: Vec<f64>,
    pub h_ss: Vec<f64>,
    pub phi_s: Vec<f64>,
    /// `[h_sss, phi_ss]` at the two poles.
    pub pole_third: [(f64, f64); 2],
}

/// Reusable curvature evaluator for one grid size.
#[derive(Debug, Clone)]
pub struct CurvatureOperator {
    stencils: Stencils,
}

impl CurvatureOperator {
    pub fn new(grid: RadialGrid) -> Self {
        CurvatureOperator {
            stencils: grid.stencils(),
        }
    }

    pub fn stencils(&self) -> &Stencils {
        &self.stencils
    }

    pub fn derivatives(&self, phi: &[f64], h: &[f64]) -> MetricDerivatives {
        let n = phi.len();
        let mut d = MetricDerivatives {
            h_s: vec![0.0; n],
            h_ss: vec![0.0; n],
            phi_s: vec![0.0; n],
            pole_third: [(0.0, 0.0); 2],
        };
        self.derivatives_into(phi, h, &mut d);
        d
    }

    pub fn derivatives_into(&self, phi: &[f64], h: &[f64], d: &mut MetricDerivatives) {
        let st = &self.stencils;
        let n = phi.len();
        st.apply_into(h, 1, &mut d.h_s);
        st.apply_into(h, 2, &mut d.h_ss);
        st.apply_into(phi, 1, &mut d.phi_s);
        let pole = |i| (st.at(h, i, 3), st.at(phi, i, 2));
        d.pole_third = [pole(0), pole(n - 1)];
    }

    /// Curvature from precomputed derivatives, written into `out`.
    pub fn curvature_from(
        &self,
        phi: &[f64],
        h: &[f64],
        d: &MetricDerivatives,
        out: &mut [f64],
    ) -> Result<()> {
        let n = phi.len();
        for i in 1..n - 1 {
            if h[i] <= 0.0 {
                return Err(Error::NonPositiveRadius {
                    index: i,
                    value: h[i],
                });
            }
            let p = phi[i];
            out[i] = -(d.h_ss[i] * p - d.h_s[i] * d.phi_s[i]) / (p * p * p * h[i]);
        }
        for (slot, i) in [(0usize, 0usize), (1, n - 1)] {
            let (h_sss, phi_ss) = d.pole_third[slot];
            let p = phi[i];
            let (h_s, h_ss, phi_s) = (d.h_s[i], d.h_ss[i], d.phi_s[i]);
            let h_r = h_s / p;
            if h_r.abs() < POLE_SLOPE_TOL {
                return Err(Error::PoleRegularization {
                    s: if i == 0 { 0.0 } else { 1.0 },
                    slope: h_r.abs(),
                    tol: POLE_SLOPE_TOL,
                });
            }
            let h_rrr = (h_sss * p - h_s * phi_ss) / p.powi(4)
                - 3.0 * (h_ss * p - h_s * phi_s) * phi_s / p.powi(5);
            out[i] = -h_rrr / h_r;
        }
        Ok(())
    }

    pub fn curvature_into(&self, phi: &[f64], h: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.derivatives(phi, h);
        self.curvature_from(phi, h, &d, out)
    }

    pub fn curvature(&self, metric: &WarpedMetric) -> Result<CurvatureField> {
        let mut values = vec![0.0; metric.len()];
        self.curvature_into(&metric.phi, &metric.h, &mut values)?;
        Ok(CurvatureField { values })
    }
}

/// Gauss curvature `K = -h_rr / h`, rewritten in the fixed gauge as
/// `-(h_ss φ - h_s φ_s) / (φ³ h)`, with L'Hôpital limits at the poles.
pub fn curvature(metric: &WarpedMetric) -> Result<CurvatureField> {
    CurvatureOperator::new(metric.grid).curvature(metric)
}

/// First and second arclength derivatives of a nodal function.
pub fn radial_derivatives(metric: &WarpedMetric, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let st = metric.grid.stencils();
    let f_s = st.apply(f, 1);
    let f_ss = st.apply(f, 2);
    let phi_s = st.apply(&metric.phi, 1);
    let f_r = f_s.iter().zip(&metric.phi).map(|(d, p)| d / p).collect();
    let f_rr = (0..f.len())
        .map(|i| {
            let p = metric.phi[i];
            (f_ss[i] * p - f_s[i] * phi_s[i]) / (p * p * p)
        })
        .collect();
    (f_r, f_rr)
}

/// `∫_0^1 f·2πφh ds`, the integral of a nodal function against area.
pub fn integrate_area(metric: &WarpedMetric, f: &[f64]) -> f64 {
    let w: Vec<f64> = f
        .iter()
        .zip(&metric.phi)
        .zip(&metric.h)
        .map(|((f, p), h)| f * p * h)
        .collect();
    2.0 * PI * simpson(&w, metric.grid.spacing())
}

/// Total area `2π ∫ φ h ds`.
pub fn area(metric: &WarpedMetric) -> f64 {
    let w: Vec<f64> = metric
        .phi
        .iter()
        .zip(&metric.h)
        .map(|(p, h)| p * h)
        .collect();
    2.0 * PI * simpson(&w, metric.grid.spacing())
}

/// `∫ K dA − 4π`.
pub fn gauss_bonnet(metric: &WarpedMetric) -> Result<f64> {
    let k = curvature(metric)?;
    Ok(gauss_bonnet_from(metric, &k))
}

pub fn gauss_bonnet_from(metric: &WarpedMetric, k: &CurvatureField) -> f64 {
    integrate_area(metric, &k.values) - 4.0 * PI
}

/// Deviation of a profile from smooth closure at the two poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDefects {
    pub h_at_0: f64,
    pub h_at_1: f64,
    /// `(dh/dr)(0) − 1`.
    pub slope_defect_0: f64,
    /// `(dh/dr)(1) + 1`.
    pub slope_defect_1: f64,
}

impl BoundaryDefects {
    pub fn max_abs(&self) -> f64 {
        [
            self.h_at_0,
            self.h_at_1,
            self.slope_defect_0,
            self.slope_defect_1,
        ]
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
    }
}

pub fn boundary_defects(metric: &WarpedMetric) -> BoundaryDefects {
    let st = metric.grid.stencils();
    let n = metric.len();
    let slope = |i: usize| st.at(&metric.h, i, 1) / metric.phi[i];
    BoundaryDefects {
        h_at_0: metric.h[0],
        h_at_1: metric.h[n - 1],
        slope_defect_0: slope(0) - 1.0,
        slope_defect_1: slope(n - 1) + 1.0,
    }
}

/// Resamples onto a uniform `n_new` grid in the arclength gauge.
///
/// `h` is interpolated against arclength by local Lagrange interpolation
/// on its odd extension through the poles. Nodes where that would leave
/// `h ≤ 0` take the monotone cubic value instead. The poles stay pinned
/// at zero.
pub fn regrid(metric: &WarpedMetric, n_new: usize) -> Result<WarpedMetric> {
    let grid = RadialGrid::new(n_new)?;
    let r = arclength(metric);
    if let Some(i) = r.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneArclength { index: i + 1 });
    }
    let total = r[r.len() - 1];
    let smooth = OddLagrange::new(&r, &metric.h, REGRID_STENCIL);
    let mut fallback = None;
    let mut h: Vec<f64> = grid
        .coords()
        .iter()
        .map(|s| {
            let x = total * s;
            let v = smooth.eval(x);
            if v > 0.0 && v.is_finite() {
                v
            } else {
                fallback
                    .get_or_insert_with(|| MonotoneCubic::new(&r, &metric.h))
                    .eval(x)
            }
        })
        .collect();
    h[0] = 0.0;
    h[n_new - 1] = 0.0;
    WarpedMetric::from_arclength(total, h)
}
