//! Randomized invariants of the operators and their expansions.

use casimir_sso::cylinder::{cyl_eigs, CylinderConfig};
use casimir_sso::greens::{green_block, GreenBlockLabel};
use casimir_sso::mse::{exact_inverse, neumann_inverse, pairing_defect};
use casimir_sso::plates::{lifshitz_mode_logdet, mse_mode_logdet, plate_self_block, Body, PlateConfig, PlateMedia};
use casimir_sso::sphere::{sphere_eigs, SphereConfig};
use casimir_sso::types::{evaluate_material, matsubara_grid};
use casimir_sso::{MaterialModel, MediumResponse, MseOrder, Temperature, Wavenumber};
use nalgebra::{Complex, Vector3};
use proptest::prelude::*;

fn max_modulus(ev: &[Complex<f64>]) -> f64 {
    ev.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn material() -> impl Strategy<Value = (f64, f64)> {
    (1.0..100.0f64, 1.0..100.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn plate_spectrum_is_paired_and_contracting((e, mu) in material(), kappa in log_uniform(1e-3, 1e3), k in 0.0..20.0f64) {
        let inside = MediumResponse::new(e, mu).unwrap();
        let media = PlateMedia { medium0: MediumResponse::VACUUM, body1: inside, body2: inside };
        let ev = plate_self_block(Body::One, k, Wavenumber::new(kappa).unwrap(), &media).unwrap().eigenvalues();
        prop_assert!(max_modulus(&ev) < 1.0);
        prop_assert!(pairing_defect(&ev) < 1e-8);
    }

    #[test]
    fn sphere_spectrum_is_paired_and_contracting((e, mu) in material(), kr in log_uniform(1e-3, 1e3), l in 1usize..8) {
        let cfg = SphereConfig::new(1.0, MaterialModel::fixed(e, mu).unwrap(), MediumResponse::VACUUM).unwrap();
        let ev = sphere_eigs(l, kr, &cfg).unwrap();
        prop_assert!(max_modulus(&ev) < 1.0);
        prop_assert!(pairing_defect(&ev) < 1e-8);
    }

    #[test]
    fn cylinder_spectrum_is_paired_and_contracting(
        (e, mu) in material(), kr in log_uniform(1e-3, 1e3), m in 0usize..8, kz in 0.0..10.0f64,
    ) {
        let cfg = CylinderConfig::new(1.0, MaterialModel::fixed(e, mu).unwrap(), MediumResponse::VACUUM).unwrap();
        let ev = cyl_eigs(m, kr, kz, &cfg).unwrap();
        prop_assert!(max_modulus(&ev) < 1.0);
        prop_assert!(pairing_defect(&ev) < 1e-8);
    }

    #[test]
    fn transparent_bodies_do_not_scatter(kr in log_uniform(1e-2, 1e2), w in 1usize..5, kz in 0.0..5.0f64) {
        let v = MediumResponse::VACUUM;
        let media = PlateMedia { medium0: v, body1: v, body2: v };
        prop_assert!(plate_self_block(Body::One, kz, Wavenumber::new(kr).unwrap(), &media).unwrap().max_abs() < 1e-14);
        let sphere = SphereConfig::new(1.0, MaterialModel::VACUUM, v).unwrap();
        prop_assert!(max_modulus(&sphere_eigs(w, kr, &sphere).unwrap()) < 1e-14);
        let cyl = CylinderConfig::new(1.0, MaterialModel::VACUUM, v).unwrap();
        prop_assert!(max_modulus(&cyl_eigs(w, kr, kz, &cyl).unwrap()) < 1e-14);
    }

    #[test]
    fn green_cross_blocks_are_antisymmetric(
        x in -3.0..3.0f64, y in -3.0..3.0f64, z in 0.1..3.0f64, kappa in log_uniform(1e-2, 10.0), (e, mu) in material(),
    ) {
        let dr = Vector3::new(x, y, z);
        let m = MediumResponse::new(e, mu).unwrap();
        let k = Wavenumber::new(kappa).unwrap();
        let he = green_block(GreenBlockLabel::HE, &dr, k, m).unwrap();
        let eh = green_block(GreenBlockLabel::EH, &dr, k, m).unwrap();
        prop_assert_eq!(eh, -he);
    }

    #[test]
    fn exact_operator_mode_matches_fresnel_mode(
        (e1, mu1) in material(), (e2, mu2) in material(), kappa in log_uniform(1e-2, 10.0), k in 0.0..10.0f64, d in 0.1..3.0f64,
    ) {
        let cfg = PlateConfig::new(
            MaterialModel::fixed(e1, mu1).unwrap(),
            MaterialModel::fixed(e2, mu2).unwrap(),
            d,
            Temperature::Zero,
        );
        let kv = Wavenumber::new(kappa).unwrap();
        let op = mse_mode_logdet(&cfg, kv, k, MseOrder::Exact).unwrap();
        let fr = lifshitz_mode_logdet(&cfg, kv, k).unwrap();
        prop_assert!((op - fr).abs() <= 1e-10 * fr.abs().max(1e-300), "{} vs {}", op, fr);
    }

    #[test]
    fn neumann_series_approaches_exact_inverse((e, mu) in material(), kappa in log_uniform(1e-2, 1e2), k in 0.0..10.0f64) {
        let inside = MediumResponse::new(e, mu).unwrap();
        let media = PlateMedia { medium0: MediumResponse::VACUUM, body1: inside, body2: inside };
        let block = plate_self_block(Body::One, k, Wavenumber::new(kappa).unwrap(), &media).unwrap();
        let exact = exact_inverse(&block).unwrap();
        let errors: Vec<f64> = [2usize, 8, 32].iter().map(|&n| (neumann_inverse(&block, n).0 - exact.0).amax()).collect();
        prop_assert!(errors[2] <= errors[0] + 1e-14);
    }

    #[test]
    fn material_response_is_positive(wp in log_uniform(1e-2, 1e2), gamma in log_uniform(1e-4, 1.0), kappa in log_uniform(1e-4, 1e4)) {
        let k = Wavenumber::new(kappa).unwrap();
        for model in [
            MaterialModel::Drude { omega_p: wp, gamma, mu: 1.0 },
            MaterialModel::Plasma { omega_p: wp, mu: 1.0 },
        ] {
            let r = evaluate_material(&model, k).unwrap();
            prop_assert!(r.epsilon > 1.0 && r.mu > 0.0);
        }
    }

    #[test]
    fn matsubara_spacing_is_uniform(tau in log_uniform(1e-4, 1e2), n in 2usize..200) {
        let grid = matsubara_grid(Temperature::Thermal(tau), n).unwrap();
        let step = grid[1].value() - grid[0].value();
        for w in grid.windows(2) {
            prop_assert!(((w[1].value() - w[0].value()) - step).abs() <= 1e-12 * step * n as f64);
        }
    }
}
