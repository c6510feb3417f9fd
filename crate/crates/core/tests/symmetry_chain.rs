use std::f64::consts::PI;

use ricci_core::symmetry::{conformal_defects, killing_residual_of_potential};
use ricci_core::{
    arclength, conformal_residual, extract_a, make_profile, potential_from_a, shoot,
    soliton_residuals, PotentialProfile, ProfileFamily, ShootConfig, WarpedMetric,
};

fn closed_profile() -> WarpedMetric {
    shoot(0.0, &ShootConfig::default())
        .unwrap()
        .closed_profile(1001)
        .unwrap()
}

/// `f_r = a·h + δ·h·(1 − cos r)`, critical at both poles.
fn tilted(m: &WarpedMetric, a: f64, delta: f64) -> PotentialProfile {
    let r = arclength(m);
    let f_r = m
        .h()
        .iter()
        .zip(&r)
        .map(|(h, r)| a * h + delta * h * (1.0 - r.cos()))
        .collect();
    PotentialProfile::from_gradient(m, f_r).unwrap()
}

#[test]
fn reduced_equations_differ_by_the_conformal_defect() {
    let m = closed_profile();
    for delta in [0.0, 1e-6, 1e-3, 0.1] {
        let f = tilted(&m, 0.0, delta);
        let res = soliton_residuals(&m, &f, 1.0).unwrap();
        let d = conformal_defects(&m, &f).unwrap();
        for i in 0..m.len() {
            let gap = res.angular[i] - res.radial[i];
            assert!((gap - d[i]).abs() < 1e-12 * (1.0 + d[i].abs()), "node {i}");
        }
    }
}

#[test]
fn small_residuals_force_agreement() {
    let m = closed_profile();
    let f = potential_from_a(&m, 0.0);
    let killing = killing_residual_of_potential(&m, &f).unwrap();
    let conformal = conformal_residual(&m, &f).unwrap();
    assert!(killing < 1e-8 && conformal < 1e-6);
    let res = soliton_residuals(&m, &f, 1.0).unwrap();
    for (a, b) in res.radial.iter().zip(&res.angular) {
        assert!((a - b).abs() <= conformal + 1e-15);
    }

    let f = tilted(&m, 0.0, 1e-3);
    assert!(conformal_residual(&m, &f).unwrap() > 1e-4);
    assert!(killing_residual_of_potential(&m, &f).unwrap() > 1e-4);
}

#[test]
fn fit_residual_tracks_killing_residual() {
    let m = make_profile(ProfileFamily::Round, 1001).unwrap();
    let h = m.h();
    let max_h = h.iter().copied().fold(0.0, f64::max);
    let min_h = h[1..h.len() - 1]
        .iter()
        .copied()
        .filter(|&v| v > 1e-3 * max_h)
        .fold(f64::INFINITY, f64::min);
    let bound = max_h / min_h;

    let exact = tilted(&m, 0.4, 0.0);
    assert!(extract_a(&m, &exact).unwrap().fit_residual < 1e-12);
    assert!(killing_residual_of_potential(&m, &exact).unwrap() < 1e-12);

    for delta in [1e-4, 1e-2, 0.3] {
        let f = tilted(&m, 0.4, delta);
        let fit = extract_a(&m, &f).unwrap();
        let killing = killing_residual_of_potential(&m, &f).unwrap();
        let ratio = killing / fit.fit_residual;
        assert!(
            ratio < bound && ratio > 1.0 / bound,
            "delta {delta}: ratio {ratio}"
        );
    }
}

#[test]
fn einstein_profile_is_round() {
    let m = closed_profile();
    let r = arclength(&m);
    assert!((r[r.len() - 1] - PI).abs() < 1e-10);
}
