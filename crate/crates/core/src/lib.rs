//! Numerical laboratory for rotationally symmetric Ricci flow on the
//! 2-sphere and for the reduced gradient shrinking soliton equation.
//!
//! - [`geometry`]: warped metrics `φ² ds² + h² dθ²`, curvature, area,
//!   Gauss–Bonnet and closure defects, arclength regridding.
//! - [`flow`]: normalized and unnormalized Ricci flow with diagnostics.
//! - [`soliton`]: shooting for `h'' = −h(1 + a h')`, the energy identity,
//!   and residuals of the full soliton equations.
//! - [`symmetry`]: Killing and conformal residuals in the symmetric gauge.
//! - [`io`]: the CSV formats shared with the command line front end.

pub mod dd;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod quadrature;
pub mod soliton;
pub mod stencil;
pub mod symmetry;

pub use error::{Error, Result};
pub use flow::{
    converged, diagnostics, entropy, mean_scalar_curvature, run, run_observed, stable_dt, step,
    DiagnosticsRecord, FlowConfig, FlowMode, FlowOutcome, FlowRun, FlowState,
};
pub use geometry::{
    arclength, area, boundary_defects, curvature, gauss_bonnet, make_profile, regrid,
    BoundaryDefects, CurvatureField, ProfileFamily, RadialGrid, WarpedMetric,
};
pub use soliton::{
    einstein_defect, identity_report, potential_from_a, reconstructed_defect, shoot,
    soliton_residuals, solve_closure, sweep_row, ClosureSolution, IdentityReport, PotentialProfile,
    ShootConfig, ShootResult, SolitonResiduals, SweepRow, Trajectory,
};
pub use symmetry::{
    conformal_residual, extract_a, killing_residual, killing_residual_of_potential, AngularField,
    GradientFit,
};
