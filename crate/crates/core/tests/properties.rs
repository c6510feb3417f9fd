use approx::assert_relative_eq;
use proptest::prelude::*;
use ricci_core::io::{read_profile, write_profile};
use ricci_core::symmetry::AngularField;
use ricci_core::{
    area, curvature, gauss_bonnet, killing_residual, make_profile, regrid, shoot, sweep_row,
    ProfileFamily, ShootConfig, WarpedMetric,
};

fn family() -> impl Strategy<Value = ProfileFamily> {
    prop_oneof![
        Just(ProfileFamily::Round),
        (-0.5f64..0.5, 1u32..4).prop_map(|(eps, k)| ProfileFamily::Perturbed { eps, k }),
    ]
}

fn profile(n: usize) -> impl Strategy<Value = WarpedMetric> {
    family().prop_map(move |f| make_profile(f, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_scales_inversely_with_area(m in profile(201), lambda in 0.25f64..4.0) {
        let scaled = m.scaled(lambda).unwrap();
        let k = curvature(&m).unwrap();
        let ks = curvature(&scaled).unwrap();
        for (a, b) in k.values.iter().zip(&ks.values) {
            assert_relative_eq!(b * lambda * lambda, *a, epsilon = 1e-9, max_relative = 1e-9);
        }
        assert_relative_eq!(area(&scaled), lambda * lambda * area(&m), max_relative = 1e-12);
        let d = gauss_bonnet(&m).unwrap();
        let ds = gauss_bonnet(&scaled).unwrap();
        prop_assert!((d - ds).abs() < 1e-9);
    }

    #[test]
    fn regrid_is_idempotent(m in profile(201)) {
        let once = regrid(&m, 201).unwrap();
        let twice = regrid(&once, 201).unwrap();
        for (a, b) in once.h().iter().zip(twice.h()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in once.phi().iter().zip(twice.phi()) {
            prop_assert!((a - b).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn killing_residual_is_linear_in_scale(lambda in 0.25f64..4.0, c in -2.0f64..2.0) {
        let m = make_profile(ProfileFamily::Round, 401).unwrap();
        let psi: Vec<f64> = m.grid().coords().iter().map(|s| (std::f64::consts::PI * s).sin() + c).collect();
        let field = AngularField::new(psi);
        let base = killing_residual(&m, &field).unwrap();
        let scaled = killing_residual(&m.scaled(lambda).unwrap(), &field).unwrap();
        assert_relative_eq!(scaled, lambda * base, max_relative = 1e-12);
    }

    #[test]
    fn profile_csv_round_trip(m in profile(41)) {
        let mut buf = Vec::new();
        write_profile(&mut buf, &m).unwrap();
        prop_assert_eq!(read_profile(buf.as_slice()).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn shooting_is_deterministic(a in -0.9f64..0.9) {
        let cfg = ShootConfig { step: 2e-3, ..ShootConfig::default() };
        let first = shoot(a, &cfg).unwrap();
        let second = shoot(a, &cfg).unwrap();
        prop_assert_eq!(&first, &second);
        let threaded = std::thread::spawn(move || sweep_row(a, &cfg).unwrap()).join().unwrap();
        prop_assert_eq!(threaded, sweep_row(a, &cfg).unwrap());
        prop_assert_eq!(threaded.closure_defect, first.closure_defect);
    }
}
