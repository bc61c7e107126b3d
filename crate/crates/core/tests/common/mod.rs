//! Finite-difference residuals of the free Green tensors, shared by the
//! integration tests and the acceptance runner.

#![allow(dead_code)]

use casimir_sso::greens::{green_block, green_tensor, GreenBlockLabel};
use casimir_sso::{MediumResponse, Wavenumber};
use nalgebra::{Matrix3, Vector3};

const H: f64 = 1e-3;

pub fn media() -> Vec<(MediumResponse, f64)> {
    vec![
        (MediumResponse::VACUUM, 0.7),
        (MediumResponse::new(3.0, 2.0).unwrap(), 1.3),
        (MediumResponse::new(1.5, 4.0).unwrap(), 0.2),
    ]
}

pub fn points() -> Vec<Vector3<f64>> {
    vec![Vector3::new(0.4, -0.3, 0.9), Vector3::new(1.2, 0.5, -0.2), Vector3::new(-0.1, 0.05, 0.35)]
}

fn block(label: GreenBlockLabel, r: &Vector3<f64>, kappa: f64, m: MediumResponse) -> Matrix3<f64> {
    green_block(label, r, Wavenumber::new(kappa).unwrap(), m).unwrap()
}

/// Fourth-order central difference along axis `a`.
fn partial(f: &dyn Fn(&Vector3<f64>) -> Matrix3<f64>, r: &Vector3<f64>, a: usize) -> Matrix3<f64> {
    let e = Vector3::ith(a, H);
    (f(&(r - 2.0 * e)) - f(&(r + 2.0 * e)) + 8.0 * (f(&(r + e)) - f(&(r - e)))) / (12.0 * H)
}

fn laplacian(f: &dyn Fn(&Vector3<f64>) -> Matrix3<f64>, r: &Vector3<f64>) -> Matrix3<f64> {
    let mut out = Matrix3::zeros();
    for a in 0..3 {
        let e = Vector3::ith(a, H);
        out += (-f(&(r + 2.0 * e)) - f(&(r - 2.0 * e)) + 16.0 * (f(&(r + e)) + f(&(r - e))) - 30.0 * f(r)) / (12.0 * H * H);
    }
    out
}

/// `max |(∇² - q²) G| / max(q² |G|, |G|)` over all blocks, media and points.
pub fn helmholtz_residual() -> f64 {
    let mut worst: f64 = 0.0;
    for (m, kappa) in media() {
        let q2 = m.product() * kappa * kappa;
        for label in GreenBlockLabel::ALL {
            let f = |r: &Vector3<f64>| block(label, r, kappa, m);
            for r in points() {
                let g = f(&r);
                let residual = laplacian(&f, &r) - g * q2;
                worst = worst.max(residual.amax() / (g.amax() * q2.max(1.0)));
            }
        }
    }
    worst
}

/// Relative divergence of the columns of `G^EE` and `G^HH`.
pub fn divergence_residual() -> f64 {
    let mut worst: f64 = 0.0;
    for (m, kappa) in media() {
        for label in [GreenBlockLabel::EE, GreenBlockLabel::HH] {
            let f = |r: &Vector3<f64>| block(label, r, kappa, m);
            for r in points() {
                let mut div = Vector3::zeros();
                for a in 0..3 {
                    div += partial(&f, &r, a).row(a).transpose();
                }
                worst = worst.max(div.amax() / f(&r).amax());
            }
        }
    }
    worst
}

/// Relative mismatch of `∇ × (G^EE c)` and `-μκ G^HE c`.
pub fn curl_residual() -> f64 {
    let mut worst: f64 = 0.0;
    for (m, kappa) in media() {
        let f = |r: &Vector3<f64>| block(GreenBlockLabel::EE, r, kappa, m);
        for r in points() {
            let d: Vec<Matrix3<f64>> = (0..3).map(|a| partial(&f, &r, a)).collect();
            let curl = Matrix3::from_fn(|i, c| {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                d[j][(k, c)] - d[k][(j, c)]
            });
            let want = block(GreenBlockLabel::HE, &r, kappa, m) * (-m.mu * kappa);
            worst = worst.max((curl - want).amax() / want.amax());
        }
    }
    worst
}

/// `G^EH = -G^HE` bitwise.
pub fn antisymmetry_exact() -> bool {
    media().into_iter().all(|(m, kappa)| {
        points().iter().all(|r| {
            let g = green_tensor(r, Wavenumber::new(kappa).unwrap(), m).unwrap();
            g.eh == -g.he
        })
    })
}

/// `G(r, r')ᵀ = ±G(r', r)` bitwise: `+` for EE and HH, `-` for the mixed blocks.
pub fn reciprocity_exact() -> bool {
    media().into_iter().all(|(m, kappa)| {
        points().iter().all(|r| {
            let w = Wavenumber::new(kappa).unwrap();
            let g = green_tensor(r, w, m).unwrap();
            let back = green_tensor(&(-r), w, m).unwrap();
            g.ee.transpose() == back.ee && g.hh.transpose() == back.hh && g.he.transpose() == -back.eh && g.eh.transpose() == -back.he
        })
    })
}
