//! Fast invariant suites run by `casimir-sso selfcheck`.

use casimir_sso::cylinder::{cyl_eigs, mse_t, t_exact, CylinderConfig};
use casimir_sso::greens::green_tensor;
use casimir_sso::mse::pairing_defect;
use casimir_sso::plates::{lifshitz_energy_per_area, mse_energy_per_area, plate_self_block, Body, PlateConfig, PlateMedia};
use casimir_sso::sphere::{high_freq_eig_limit, sphere_eigs, SphereConfig};
use casimir_sso::statics::{static_sphere_eigs, SphereGrid, StaticContrast};
use casimir_sso::types::Inverse;
use casimir_sso::{MaterialModel, MediumResponse, MseOrder, Temperature, Wavenumber};
use nalgebra::{Complex, Vector3};

use crate::output::Table;

type Check = Result<String, String>;

fn max_modulus(ev: &[Complex<f64>]) -> f64 {
    ev.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn greens() -> Check {
    let media = [MediumResponse::VACUUM, MediumResponse::new(3.0, 2.0).map_err(err)?];
    let mut worst: f64 = 0.0;
    for m in media {
        for dr in [Vector3::new(0.3, -0.4, 1.1), Vector3::new(-2.0, 0.5, 0.1)] {
            let k = Wavenumber::new(0.8).map_err(err)?;
            let g = green_tensor(&dr, k, m).map_err(err)?;
            let back = green_tensor(&-dr, k, m).map_err(err)?;
            let scale = g.ee.amax().max(g.he.amax());
            worst = worst.max((g.eh + g.he).amax() / scale);
            worst = worst.max((g.ee.transpose() - back.ee).amax() / scale);
            worst = worst.max((g.hh.transpose() - back.hh).amax() / scale);
        }
    }
    if worst < 1e-14 {
        Ok(format!("antisymmetry and reciprocity defect {worst:.1e}"))
    } else {
        Err(format!("antisymmetry or reciprocity defect {worst:.1e}"))
    }
}

fn spectra() -> Check {
    let (mut modulus, mut pairing): (f64, f64) = (0.0, 0.0);
    for (e, mu) in [(4.0, 1.0), (1.0, 4.0), (30.0, 2.0)] {
        let inside = MediumResponse::new(e, mu).map_err(err)?;
        let media = PlateMedia { medium0: MediumResponse::VACUUM, body1: inside, body2: inside };
        let sphere = SphereConfig::new(1.0, MaterialModel::fixed(e, mu).map_err(err)?, MediumResponse::VACUUM).map_err(err)?;
        let cyl = CylinderConfig::new(1.0, MaterialModel::fixed(e, mu).map_err(err)?, MediumResponse::VACUUM).map_err(err)?;
        for kr in [0.01, 0.3, 1.0, 7.0, 50.0] {
            let mut check = |ev: [Complex<f64>; 4]| {
                modulus = modulus.max(max_modulus(&ev));
                pairing = pairing.max(pairing_defect(&ev));
            };
            check(plate_self_block(Body::One, 0.7, Wavenumber::new(kr).map_err(err)?, &media).map_err(err)?.eigenvalues());
            for w in 1..=3 {
                check(sphere_eigs(w, kr, &sphere).map_err(err)?);
                check(cyl_eigs(w, kr, 0.5, &cyl).map_err(err)?);
            }
        }
    }
    let msg = format!("max |lambda| {modulus:.4}, pairing defect {pairing:.1e}");
    if modulus < 1.0 && pairing < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn high_frequency() -> Check {
    let sphere = SphereConfig::new(1.0, MaterialModel::fixed(4.0, 1.0).map_err(err)?, MediumResponse::VACUUM).map_err(err)?;
    let (a, b) = high_freq_eig_limit(MediumResponse::VACUUM, MediumResponse::new(4.0, 1.0).map_err(err)?);
    let limits = [a.abs(), b.abs()];
    let ev = sphere_eigs(2, 100.0, &sphere).map_err(err)?;
    let worst = ev
        .iter()
        .map(|v| limits.iter().map(|l| (v.norm() - l).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    if worst < 1e-2 {
        Ok(format!("sphere l=2 at kR=100 within {worst:.1e} of the limit"))
    } else {
        Err(format!("sphere l=2 at kR=100 deviates {worst:.1e} from the limit"))
    }
}

fn plates_agree() -> Check {
    let cfg = PlateConfig::new(
        MaterialModel::fixed(4.0, 2.0).map_err(err)?,
        MaterialModel::fixed(9.0, 0.5).map_err(err)?,
        1.0,
        Temperature::Zero,
    );
    let exact = mse_energy_per_area(&cfg, MseOrder::Exact).map_err(err)?.value;
    let lifshitz = lifshitz_energy_per_area(&cfg).map_err(err)?.value;
    let rel = (exact / lifshitz - 1.0).abs();
    if rel < 1e-6 {
        Ok(format!("operator and Lifshitz energies agree to {rel:.1e}"))
    } else {
        Err(format!("operator {exact} vs Lifshitz {lifshitz}"))
    }
}

fn cylinder_t() -> Check {
    let cfg = CylinderConfig::new(1.0, MaterialModel::fixed(30.0, 1.0).map_err(err)?, MediumResponse::VACUUM).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (m, kz) in [(0, 1.0), (1, 0.5), (3, 2.0)] {
        let exact = t_exact(m, 1.0, kz, &cfg).map_err(err)?.scaled;
        let series = mse_t(m, 1.0, kz, &cfg, Inverse::Exact).map_err(err)?.scaled;
        worst = worst.max((exact - series).amax() / exact.amax());
    }
    let eh = t_exact(0, 1.0, 1.0, &cfg).map_err(err)?.eh();
    if worst < 1e-8 && eh == 0.0 {
        Ok(format!("expansion reproduces the closed form to {worst:.1e}; m=0 decouples"))
    } else {
        Err(format!("closed-form mismatch {worst:.1e}, m=0 T_EH = {eh}"))
    }
}

fn statics() -> Check {
    let grid = SphereGrid::new(1.0, 24).map_err(err)?;
    let contrast = StaticContrast::new(1.0, 3.0).map_err(err)?;
    let eigs = static_sphere_eigs(4, contrast, &grid).map_err(err)?;
    let c = contrast.value().abs();
    let worst = eigs.iter().skip(1).map(|v| v.abs() / c).fold(0.0, f64::max);
    if worst < 1.0 {
        Ok(format!("l >= 1 eigenvalues within {worst:.4} of |contrast|"))
    } else {
        Err(format!("l >= 1 eigenvalue reaches {worst:.4} of |contrast|"))
    }
}

fn zero_contrast() -> Check {
    let v = MaterialModel::VACUUM;
    let cfg = PlateConfig::new(v, v, 1.0, Temperature::Zero);
    let e = mse_energy_per_area(&cfg, MseOrder::Exact).map_err(err)?.value;
    let block = plate_self_block(
        Body::One,
        1.0,
        Wavenumber::new(1.0).map_err(err)?,
        &PlateMedia { medium0: MediumResponse::VACUUM, body1: MediumResponse::VACUUM, body2: MediumResponse::VACUUM },
    )
    .map_err(err)?;
    if e == 0.0 && block.max_abs() < 1e-14 {
        Ok("vacuum plates give zero operator and energy".into())
    } else {
        Err(format!("vacuum plates: energy {e}, block {}", block.max_abs()))
    }
}

pub fn run() -> Table {
    let suites: [(&str, fn() -> Check); 7] = [
        ("greens", greens),
        ("spectral_bounds", spectra),
        ("high_frequency_limit", high_frequency),
        ("plates_exact_vs_lifshitz", plates_agree),
        ("cylinder_t_matrix", cylinder_t),
        ("static_sphere", statics),
        ("zero_contrast", zero_contrast),
    ];
    let mut t = Table::new(["suite", "passed", "detail"]);
    for (name, f) in suites {
        let (ok, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        t.converged &= ok;
        t.push(vec![name.into(), ok.into(), detail.into()]);
    }
    t
}
