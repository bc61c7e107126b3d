//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances are fixed constants next to each check.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use casimir_sso::cp::{cp_energy, gamma_plate_coincident, CpConfig, Polarizability};
use casimir_sso::cylinder::{cyl_eigs, cyl_sso_block, mse_t, t_exact, CylinderConfig, CylinderMethod};
use casimir_sso::mse::{pairing_defect, round_trip_split};
use casimir_sso::plates::{
    casimir_force_per_area, lifshitz_energy_per_area, lifshitz_force_per_area, lifshitz_mode, lifshitz_mode_logdet,
    mse_energy_per_area, mse_mode_logdet, plate_cross_block, plate_self_block, Body, CrossDirection, FresnelPair, PlateConfig,
    PlateMedia,
};
use casimir_sso::quad::{integrate_semi_infinite, QuadratureConfig};
use casimir_sso::sphere::{high_freq_eig_limit, sphere_eigs, sphere_sso_block, SphereConfig, SphereMethod};
use casimir_sso::statics::{static_plate_n0_energy, static_plate_n0_term, static_reflections, static_sphere_eigs, SphereGrid, StaticContrast};
use casimir_sso::units::LengthUnit;
use casimir_sso::types::Inverse;
use casimir_sso::{MaterialModel, MediumResponse, MseOrder, Temperature, Wavenumber};
use nalgebra::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn vacuum() -> MediumResponse {
    MediumResponse::VACUUM
}

fn fixed(epsilon: f64, mu: f64) -> MaterialModel {
    MaterialModel::fixed(epsilon, mu).unwrap()
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn max_modulus(ev: &[Complex<f64>]) -> f64 {
    ev.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn lifshitz_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let eps: Vec<f64> = (0..10).map(|_| rng.random_range(1.0..100.0)).collect();
    let kappas: Vec<f64> = (0..10).map(|_| log_uniform(&mut rng, 0.01, 10.0)).collect();
    let ks: Vec<f64> = (0..10).map(|_| log_uniform(&mut rng, 0.01, 10.0)).collect();
    let mut worst: f64 = 0.0;
    for (i, &e1) in eps.iter().enumerate() {
        let cfg = PlateConfig::new(fixed(e1, 1.0), fixed(eps[9 - i], 1.0), 1.0, Temperature::Zero);
        for &kappa in &kappas {
            let w = Wavenumber::new(kappa).unwrap();
            for &k in &ks {
                let a = mse_mode_logdet(&cfg, w, k, MseOrder::Exact).unwrap();
                let b = lifshitz_mode_logdet(&cfg, w, k).unwrap();
                worst = worst.max(rel(a, b));
            }
        }
    }
    Outcome::new(worst < 1e-10, format!("max relative deviation {worst:.2e} (tol 1e-10)"))
}

fn perfect_conductor_plates() -> Outcome {
    let d = 1.0;
    let pc = PlateConfig::new(MaterialModel::PerfectConductor, MaterialModel::PerfectConductor, d, Temperature::Zero);
    let energy = mse_energy_per_area(&pc, MseOrder::Exact).unwrap().value;
    let force = casimir_force_per_area(&pc, MseOrder::Exact).unwrap().value;
    let e_ref = -PI * PI / (720.0 * d.powi(3));
    let f_ref = -PI * PI / (240.0 * d.powi(4));
    let big = fixed(1e8, 1.0);
    let diel = mse_energy_per_area(&PlateConfig::new(big, big, d, Temperature::Zero), MseOrder::Exact).unwrap().value;
    let (de, df, dd) = (rel(energy, e_ref), rel(force, f_ref), rel(diel, e_ref));
    Outcome::new(
        de < 1e-6 && df < 1e-6 && dd < 1e-3,
        format!("energy {de:.2e} (1e-6), force {df:.2e} (1e-6), eps=1e8 {dd:.2e} (1e-3)"),
    )
}

fn zero_contrast_null() -> Outcome {
    let v = MaterialModel::VACUUM;
    let d = 1.3;
    let mut worst: f64 = 0.0;
    let mut note = |x: f64| worst = worst.max(x.abs());
    let unit = LengthUnit::Micrometre;
    for temperature in [Temperature::Zero, Temperature::kelvin(300.0, unit).unwrap()] {
        let cfg = PlateConfig::new(v, v, d, temperature);
        note(lifshitz_energy_per_area(&cfg).unwrap().value * d.powi(3));
        note(lifshitz_force_per_area(&cfg).unwrap().value * d.powi(4));
        for order in [MseOrder::Exact, MseOrder::new(1, 2)] {
            note(mse_energy_per_area(&cfg, order).unwrap().value * d.powi(3));
            note(casimir_force_per_area(&cfg, order).unwrap().value * d.powi(4));
        }
        let cp = CpConfig::new(d, v, temperature, MseOrder::Exact);
        note(cp_energy(&Polarizability::electric(1.0, 2.0).unwrap(), &cp).unwrap().value * d.powi(4));
    }
    let media = PlateMedia { medium0: vacuum(), body1: vacuum(), body2: vacuum() };
    for kappa in [0.1, 1.0, 10.0] {
        let w = Wavenumber::new(kappa).unwrap();
        for k in [0.0, 0.5, 3.0] {
            note(plate_self_block(Body::One, k, w, &media).unwrap().max_abs());
            note(plate_self_block(Body::Two, k, w, &media).unwrap().max_abs());
            // the energy routes skip transparent bodies, so check the round trip itself
            let k11 = plate_self_block(Body::One, k, w, &media).unwrap();
            let k22 = plate_self_block(Body::Two, k, w, &media).unwrap();
            let k12 = plate_cross_block(CrossDirection::K12, k, w, d, &media).unwrap();
            let k21 = plate_cross_block(CrossDirection::K21, k, w, d, &media).unwrap();
            note(round_trip_split(&k11, &k12, &k22, &k21, Inverse::Exact, Inverse::Exact).unwrap().logdet_one_minus);
        }
    }
    let sphere = SphereConfig::new(1.0, v, vacuum()).unwrap();
    let cyl = CylinderConfig::new(1.0, v, vacuum()).unwrap();
    for kr in [0.01, 1.0, 50.0] {
        for l in [1, 4] {
            note(sphere_sso_block(l, kr, &sphere, SphereMethod::AdditionTheorem).unwrap().block.max_abs());
        }
        for m in [0, 2] {
            note(t_exact(m, kr, 0.7, &cyl).unwrap().scaled.amax());
            note(mse_t(m, kr, 0.7, &cyl, Inverse::Neumann(3)).unwrap().scaled.amax());
            note(cyl_sso_block(m, kr, 0.7, &cyl, CylinderMethod::Analytic).unwrap().block.max_abs());
        }
    }
    note(sphere_sso_block(2, 1.0, &sphere, SphereMethod::Quadrature).unwrap().block.max_abs());
    note(cyl_sso_block(1, 1.0, 0.7, &cyl, CylinderMethod::Quadrature).unwrap().block.max_abs());
    let grid = SphereGrid::new(1.0, 16).unwrap();
    for v in static_sphere_eigs(4, StaticContrast::ZERO, &grid).unwrap() {
        note(v);
    }
    note(static_plate_n0_term([(0.0, 0.0), (0.0, 0.0)], d, None).unwrap() * d * d);
    Outcome::new(worst < 1e-14, format!("largest scaled magnitude {worst:.2e} (tol 1e-14)"))
}

fn plate_mse_convergence() -> Outcome {
    let unit = LengthUnit::Nanometre;
    let silicon = fixed(12.0, 1.0);
    let gold = MaterialModel::gold_like(unit);
    let temperature = Temperature::kelvin(300.0, unit).unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for d in [100.0, 200.0, 500.0, 1000.0] {
        let cfg = PlateConfig::new(silicon, gold, d, temperature);
        let exact = mse_energy_per_area(&cfg, MseOrder::Exact).unwrap().value;
        let ratio = |k, l| mse_energy_per_area(&cfg, MseOrder::new(k, l)).unwrap().value / exact;
        let r00 = ratio(0, 0);
        let err12 = (ratio(1, 2) - 1.0).abs();
        let mut monotone = true;
        for l in 0..=2 {
            let errs: Vec<f64> = (0..=3).map(|k| (ratio(k, l) - 1.0).abs()).collect();
            monotone &= errs.windows(2).all(|w| w[1] < w[0]);
        }
        ok &= (0.60..=0.95).contains(&r00) && err12 < 0.03 && monotone;
        lines.push(format!("d={d}nm MSE00/exact={r00:.4} |MSE12/exact-1|={err12:.4} monotone={monotone}"));
    }
    Outcome::new(ok, format!("{} (MSE00 in [0.60,0.95], MSE12 within 3%)", lines.join("; ")))
}

fn high_frequency_limit() -> Outcome {
    let mut worst_at_100: f64 = 0.0;
    let mut decreasing = true;
    for (e, mu) in [(4.0, 1.0), (1.0, 4.0), (16.0, 2.0)] {
        let inside = MediumResponse::new(e, mu).unwrap();
        let target = high_freq_eig_limit(vacuum(), inside).0.abs();
        let sphere = SphereConfig::new(1.0, fixed(e, mu), vacuum()).unwrap();
        let cyl = CylinderConfig::new(1.0, fixed(e, mu), vacuum()).unwrap();
        let deviation = |kr: f64| {
            let mut dev: f64 = 0.0;
            for l in 1..=3 {
                for z in sphere_eigs(l, kr, &sphere).unwrap() {
                    dev = dev.max((z.norm() - target).abs());
                }
            }
            for m in 0..=2 {
                for kz in [0.0, 1.0, 2.0] {
                    for z in cyl_eigs(m, kr, kz, &cyl).unwrap() {
                        dev = dev.max((z.norm() - target).abs());
                    }
                }
            }
            dev
        };
        let devs: Vec<f64> = [10.0, 30.0, 100.0].iter().map(|&kr| deviation(kr)).collect();
        decreasing &= devs.windows(2).all(|w| w[1] < w[0]);
        worst_at_100 = worst_at_100.max(devs[2]);
    }
    Outcome::new(
        worst_at_100 < 1e-2 && decreasing,
        format!("max deviation at kR=100 {worst_at_100:.2e} (tol 1e-2), decreasing over kR=10,30,100: {decreasing}"),
    )
}

fn spectral_bounds() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut modulus: f64 = 0.0;
    let mut pairing: f64 = 0.0;
    let mut count = 0usize;
    let mut record = |ev: &[Complex<f64>]| {
        modulus = modulus.max(max_modulus(ev));
        pairing = pairing.max(pairing_defect(ev));
        count += 1;
    };
    for _ in 0..3000 {
        let (e, mu) = (rng.random_range(1.0..100.0), rng.random_range(1.0..100.0));
        let kr = log_uniform(&mut rng, 1e-3, 1e3);
        let wave = rng.random_range(0..=10usize);
        let kz = rng.random_range(0.0..10.0);
        let inside = MediumResponse::new(e, mu).unwrap();
        let media = PlateMedia { medium0: vacuum(), body1: inside, body2: inside };
        record(&plate_self_block(Body::One, kz, Wavenumber::new(kr).unwrap(), &media).unwrap().eigenvalues());
        let sphere = SphereConfig::new(1.0, fixed(e, mu), vacuum()).unwrap();
        record(&sphere_eigs(wave.max(1), kr, &sphere).unwrap());
        let cyl = CylinderConfig::new(1.0, fixed(e, mu), vacuum()).unwrap();
        record(&cyl_eigs(wave, kr, kz, &cyl).unwrap());
    }
    for _ in 0..40 {
        let (e, mu) = (rng.random_range(1.0..100.0), rng.random_range(1.0..100.0));
        let kr = log_uniform(&mut rng, 1e-3, 1e3);
        let wave = rng.random_range(0..=10usize);
        let kz = rng.random_range(0.0..10.0);
        let sphere = SphereConfig::new(1.0, fixed(e, mu), vacuum()).unwrap();
        record(&sphere_sso_block(wave.max(1), kr, &sphere, SphereMethod::Quadrature).unwrap().block.eigenvalues());
        let cyl = CylinderConfig::new(1.0, fixed(e, mu), vacuum()).unwrap();
        record(&cyl_sso_block(wave, kr, kz, &cyl, CylinderMethod::Quadrature).unwrap().block.eigenvalues());
    }
    Outcome::new(
        modulus < 1.0 && pairing < 1e-8,
        format!("{count} blocks: max |lambda| {modulus:.6} (< 1), max pairing defect {pairing:.2e} (tol 1e-8)"),
    )
}

fn cylinder_identities() -> Outcome {
    let cfg = CylinderConfig::new(1.0, fixed(30.0, 1.0), vacuum()).unwrap();
    let mut antisym = true;
    let mut decoupled = true;
    for (m, kr, kz) in [(1, 1.0, 1.0), (2, 0.3, 4.0), (5, 20.0, 0.5), (0, 1.0, 1.0), (3, 2.0, 0.0)] {
        let t = t_exact(m, kr, kz, &cfg).unwrap();
        antisym &= t.he() == -t.eh();
        if m == 0 || kz == 0.0 {
            decoupled &= t.eh() == 0.0 && t.he() == 0.0;
        }
    }
    let mut jump: f64 = 0.0;
    let mut finite = true;
    for m in [0, 1, 3] {
        let mut prev: Option<nalgebra::Matrix2<f64>> = None;
        for i in 0..=3000 {
            let kr = 10f64.powf(3.0 * i as f64 / 3000.0);
            let t = t_exact(m, kr, 1.0, &cfg).unwrap().scaled;
            finite &= t.iter().all(|x| x.is_finite());
            if let Some(p) = prev {
                jump = jump.max((t - p).amax() / t.amax());
            }
            prev = Some(t);
        }
    }
    let t = t_exact(1, 1.0, 1.0, &cfg).unwrap();
    let reg = [
        rel(t.ee(), -0.120_920_726_128_976_92),
        rel(t.he(), -0.018_735_624_420_888_73),
        rel(t.hh(), 0.072_120_932_159_528_01),
        rel(t.value()[(0, 0)], -2.045_837_049_062_98),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let continuous = finite && jump < 1e-2;
    Outcome::new(
        antisym && decoupled && continuous && reg < 1e-10,
        format!(
            "antisymmetry {antisym}, decoupling {decoupled}, largest step change to kR=1e3 {jump:.2e} (finite {finite}), regression {reg:.2e} (tol 1e-10)"
        ),
    )
}

fn cylinder_mse() -> Outcome {
    let cfg = CylinderConfig::new(1.0, fixed(30.0, 1.0), vacuum()).unwrap();
    let grid: Vec<f64> = (0..10).map(|i| 0.2 + 0.2 * i as f64).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut worst40: f64 = 0.0;
    let mut skipped = 0;
    for m in [0, 1] {
        for &kr in &grid {
            for &kz in &grid {
                let exact = t_exact(m, kr, kz, &cfg).unwrap().scaled;
                let p3 = mse_t(m, kr, kz, &cfg, Inverse::Neumann(3)).unwrap().scaled;
                for (a, b) in p3.iter().zip(exact.iter()) {
                    if b.abs() > 1e-12 * exact.amax() {
                        lo = lo.min(a / b);
                        hi = hi.max(a / b);
                    }
                }
                if max_modulus(&cyl_eigs(m, kr, kz, &cfg).unwrap()) >= 0.7 {
                    skipped += 1;
                    continue;
                }
                let p40 = mse_t(m, kr, kz, &cfg, Inverse::Neumann(40)).unwrap().scaled;
                for (a, b) in p40.iter().zip(exact.iter()) {
                    if b.abs() > 1e-12 * exact.amax() {
                        worst40 = worst40.max(rel(*a, *b));
                    }
                }
            }
        }
    }
    Outcome::new(
        lo >= 0.85 && hi <= 1.15 && worst40 < 1e-6,
        format!(
            "p=3 ratio range [{lo:.4}, {hi:.4}] (need [0.85,1.15]); p=40 max deviation {worst40:.2e} (tol 1e-6, {skipped} corner blocks with rho(K)>=0.7 excluded)"
        ),
    )
}

fn static_suite() -> Outcome {
    let grid = SphereGrid::new(1.0, 24).unwrap();
    let mut real = true;
    let mut bound = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_dipolar: f64 = 0.0;
    for (outside, inside) in [(1.0, 3.0), (1.0, 50.0), (4.0, 1.0), (1.0, 1.5)] {
        let c = StaticContrast::new(outside, inside).unwrap();
        match static_sphere_eigs(6, c, &grid) {
            Ok(ev) => {
                for (l, v) in ev.into_iter().enumerate() {
                    let ratio = v.abs() / c.value().abs();
                    worst_ratio = worst_ratio.max(ratio);
                    if l > 0 {
                        worst_dipolar = worst_dipolar.max(ratio);
                    }
                    // equality counts as a violation of the strict bound
                    bound &= ratio < 1.0 - 1e-12;
                }
            }
            Err(_) => real = false,
        }
    }

    let d = 1.7;
    let b1 = fixed(4.0, 2.0);
    let b2 = fixed(9.0, 0.5);
    let cfg = PlateConfig::new(b1, b2, d, Temperature::Thermal(0.3));
    let tight = QuadratureConfig::with_rel_tol(1e-13);
    let tiny = Wavenumber::new(1e-9 / d).unwrap();
    let (o, i1, i2) = (vacuum(), b1.evaluate(tiny).unwrap(), b2.evaluate(tiny).unwrap());
    let fresnel = integrate_semi_infinite(
        |k| k / (2.0 * PI) * lifshitz_mode(FresnelPair::new(k, tiny, o, i1), FresnelPair::new(k, tiny, o, i2), k, d),
        1.0 / d,
        &tight,
    );
    let n0 = static_plate_n0_energy(&cfg).unwrap();
    let from_sum = 0.5 * 0.3 * lifshitz_energy_per_area(&cfg).unwrap().breakdown.unwrap().terms[0].value;
    let n0_dev = rel(n0, 0.5 * 0.3 * fresnel.value).max(rel(from_sum, n0));

    let kappa = Wavenumber::new(1e-6 / d).unwrap();
    let finite = integrate_semi_infinite(|k| k / (2.0 * PI) * mse_mode_logdet(&cfg, kappa, k, MseOrder::Exact).unwrap(), 1.0 / d, &tight);
    let r = [static_reflections(&MaterialModel::VACUUM, &b1).unwrap(), static_reflections(&MaterialModel::VACUUM, &b2).unwrap()];
    let finite_dev = rel(finite.value, static_plate_n0_term(r, d, None).unwrap());

    Outcome::new(
        real && bound && n0_dev < 1e-10 && finite_dev < 1e-4,
        format!(
            "Nystrom real {real}, max |lambda|/|c| {worst_ratio:.15} (strictly < 1: {bound}; {worst_dipolar:.4} without l=0), n=0 vs Fresnel {n0_dev:.2e} (1e-10), kappa=1e-6/d vs static {finite_dev:.2e} (1e-4)"
        ),
    )
}

/// Half-space reflection form of `(Γ^EE_xx, Γ^EE_zz, Γ^HH_xx, Γ^HH_zz)` per mode.
fn reflection_integrand(k: f64, kappa: f64, z0: f64, i: MediumResponse) -> [f64; 4] {
    let s0 = (kappa * kappa + k * k).sqrt();
    let s1 = (i.product() * kappa * kappa + k * k).sqrt();
    let rtm = (i.epsilon * s0 - s1) / (i.epsilon * s0 + s1);
    let rte = (i.mu * s0 - s1) / (i.mu * s0 + s1);
    let x = (-2.0 * s0 * z0).exp();
    let p = -kappa / (2.0 * s0) * x;
    let n2 = kappa * kappa;
    let w = k / (2.0 * PI);
    [
        w * p * 0.5 * (rte - rtm * s0 * s0 / n2),
        w * p * (-rtm * k * k / n2),
        w * p * 0.5 * (rtm - rte * s0 * s0 / n2),
        w * p * (-rte * k * k / n2),
    ]
}

fn casimir_polder() -> Outcome {
    let tight = QuadratureConfig::with_rel_tol(1e-13);
    let mut oracle_dev: f64 = 0.0;
    for (kappa, z0, e, mu) in [(0.5, 1.0, 4.0, 1.0), (2.0, 0.3, 12.0, 3.0), (0.05, 2.0, 1.5, 8.0)] {
        let plate = fixed(e, mu);
        let g = gamma_plate_coincident(z0, Wavenumber::new(kappa).unwrap(), &plate, &MaterialModel::VACUUM, MseOrder::Exact, &tight).unwrap();
        let got = [g.ee_diag[0], g.ee_diag[1], g.hh_diag[0], g.hh_diag[1]];
        for (c, value) in got.iter().enumerate() {
            let want = integrate_semi_infinite(|k| reflection_integrand(k, kappa, z0, MediumResponse::new(e, mu).unwrap())[c], 1.0 / z0, &tight).value;
            oracle_dev = oracle_dev.max(rel(*value, want));
        }
    }

    let atom = Polarizability::electric(1.0, 1.0).unwrap();
    let slope = |zs: &[f64]| {
        let pts: Vec<(f64, f64)> = zs
            .iter()
            .map(|&z| {
                let cfg = CpConfig {
                    quadrature: QuadratureConfig::with_rel_tol(1e-11),
                    ..CpConfig::new(z, MaterialModel::PerfectConductor, Temperature::Zero, MseOrder::Exact)
                };
                (z.ln(), (-cp_energy(&atom, &cfg).unwrap().value).ln())
            })
            .collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
    };
    let far = slope(&[1000.0, 1500.0, 2000.0]);
    let near = slope(&[0.001, 0.0015, 0.002]);

    let mut monotone = true;
    for e in [2.0, 5.0, 10.0] {
        let cfg = |order| CpConfig { quadrature: QuadratureConfig::with_rel_tol(1e-11), ..CpConfig::new(1.0, fixed(e, 1.0), Temperature::Zero, order) };
        let exact = cp_energy(&atom, &cfg(MseOrder::Exact)).unwrap().value;
        let errs: Vec<f64> = (0..=4).map(|l| (cp_energy(&atom, &cfg(MseOrder::new(0, l))).unwrap().value - exact).abs()).collect();
        monotone &= errs.windows(2).all(|w| w[1] < w[0]);
    }
    Outcome::new(
        oracle_dev < 1e-9 && (far + 4.0).abs() <= 0.02 && (near + 3.0).abs() <= 0.05 && monotone,
        format!("oracle {oracle_dev:.2e} (1e-9), retarded exponent {far:.4} (-4 +- 0.02), near exponent {near:.4} (-3 +- 0.05), order error monotone {monotone}"),
    )
}

fn green_suite() -> Outcome {
    let (h, div, curl) = (common::helmholtz_residual(), common::divergence_residual(), common::curl_residual());
    let (anti, reci) = (common::antisymmetry_exact(), common::reciprocity_exact());
    Outcome::new(
        anti && reci && h < 1e-6 && div < 1e-6 && curl < 1e-6,
        format!("antisymmetry {anti}, reciprocity {reci}, Helmholtz {h:.1e}, divergence {div:.1e}, curl {curl:.1e} (tol 1e-6)"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("1 Lifshitz equivalence", lifshitz_equivalence, 10),
        ("2 perfect-conductor plates", perfect_conductor_plates, 30),
        ("3 zero-contrast null", zero_contrast_null, u64::MAX),
        ("4 plate MSE convergence", plate_mse_convergence, 120),
        ("5 high-frequency limit", high_frequency_limit, u64::MAX),
        ("6 spectral bounds and pairing", spectral_bounds, 120),
        ("7 cylinder T-matrix identities", cylinder_identities, u64::MAX),
        ("8 cylinder MSE", cylinder_mse, 300),
        ("9 static suite", static_suite, u64::MAX),
        ("10 Casimir-Polder", casimir_polder, u64::MAX),
        ("11 Green-tensor suite", green_suite, 5),
    ];
    // optional criterion numbers on the command line select a subset
    let selected: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    let mut ran = 0;
    for (name, run, budget) in criteria {
        if !selected.is_empty() && !selected.iter().any(|s| name.split(' ').next() == Some(s.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        let timing = if budget == u64::MAX { format!("{:.1}s", elapsed.as_secs_f64()) } else { format!("{:.1}s of {budget}s", elapsed.as_secs_f64()) };
        println!("{} criterion {name}: {} [{timing}]", if pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("{} of {ran} criteria passed", ran - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
