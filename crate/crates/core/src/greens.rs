//! Free-space Green functions at imaginary frequency.
//!
//! With `g(r) = e^{-qr}/(4πr)`, `q = κ√(εμ)` and `∂` acting on `dr = r - r'`:
//!
//! ```text
//! G^EE = (1/(εκ)) ∂∂g - μκ g 1      G^HE c =  ∇g × c
//! G^HH = (1/(μκ)) ∂∂g - εκ g 1      G^EH c = -∇g × c
//! ```
//!
//! so that a current pair `(j, m)` radiates `E = G^EE j + G^EH m` and
//! `H = G^HE j + G^HH m`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{MediumResponse, Wavenumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GreenBlockLabel {
    EE,
    HH,
    HE,
    EH,
}

impl GreenBlockLabel {
    pub const ALL: [GreenBlockLabel; 4] = [GreenBlockLabel::EE, GreenBlockLabel::HH, GreenBlockLabel::HE, GreenBlockLabel::EH];
}

/// `e^{-κ√(εμ) r}/(4πr)`
pub fn scalar_green(separation: f64, kappa: Wavenumber, medium: MediumResponse) -> Result<f64> {
    if !(separation > 0.0) {
        return Err(Error::NonPositiveSeparation(separation));
    }
    let q = kappa.value() * medium.index();
    Ok((-q * separation).exp() / (4.0 * PI * separation))
}

/// `g`, `∇g` and `∂_i∂_j g` at `dr ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarDerivatives {
    pub g: f64,
    pub grad: Vector3<f64>,
    pub hessian: Matrix3<f64>,
}

impl ScalarDerivatives {
    pub fn at(dr: &Vector3<f64>, q: f64) -> Self {
        let r = dr.norm();
        let rh = dr / r;
        let x = q * r;
        let e = (-x).exp();
        let four_pi_r = 4.0 * PI * r;
        let g = e / four_pi_r;
        let g1 = -(1.0 + x) * e / (four_pi_r * r);
        let g2 = e * (2.0 + 2.0 * x + x * x) / (four_pi_r * r * r);
        let rr = rh * rh.transpose();
        let hessian = rr * g2 + (Matrix3::identity() - rr) * (g1 / r);
        ScalarDerivatives { g, grad: rh * g1, hessian }
    }
}

/// Matrix of `c ↦ v × c`.
pub fn cross_matrix(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// All four 3×3 blocks at one separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTensor {
    pub ee: Matrix3<f64>,
    pub hh: Matrix3<f64>,
    pub he: Matrix3<f64>,
    pub eh: Matrix3<f64>,
}

impl GreenTensor {
    pub fn block(&self, label: GreenBlockLabel) -> Matrix3<f64> {
        match label {
            GreenBlockLabel::EE => self.ee,
            GreenBlockLabel::HH => self.hh,
            GreenBlockLabel::HE => self.he,
            GreenBlockLabel::EH => self.eh,
        }
    }
}

pub fn green_tensor(dr: &Vector3<f64>, kappa: Wavenumber, medium: MediumResponse) -> Result<GreenTensor> {
    let r = dr.norm();
    if !(r > 0.0) {
        return Err(Error::NonPositiveSeparation(r));
    }
    if kappa.is_zero() {
        return Err(Error::StaticLimit("G^EE and G^HH"));
    }
    let k = kappa.value();
    let d = ScalarDerivatives::at(dr, k * medium.index());
    let id = Matrix3::identity();
    let he = cross_matrix(&d.grad);
    Ok(GreenTensor {
        ee: d.hessian / (medium.epsilon * k) - id * (medium.mu * k * d.g),
        hh: d.hessian / (medium.mu * k) - id * (medium.epsilon * k * d.g),
        he,
        eh: -he,
    })
}

pub fn green_block(label: GreenBlockLabel, dr: &Vector3<f64>, kappa: Wavenumber, medium: MediumResponse) -> Result<Matrix3<f64>> {
    match label {
        GreenBlockLabel::HE | GreenBlockLabel::EH => {
            let r = dr.norm();
            if !(r > 0.0) {
                return Err(Error::NonPositiveSeparation(r));
            }
            let d = ScalarDerivatives::at(dr, kappa.value() * medium.index());
            let he = cross_matrix(&d.grad);
            Ok(if label == GreenBlockLabel::HE { he } else { -he })
        }
        _ => Ok(green_tensor(dr, kappa, medium)?.block(label)),
    }
}

/// `(1 + x) e^{-x}` minus the same at `y`.
fn phi1_difference(x: f64, y: f64) -> f64 {
    if x.max(y) > 0.5 {
        return (1.0 + x) * (-x).exp() - (1.0 + y) * (-y).exp();
    }
    // Σ_{n≥2} (-1)^n (1 - n) (xⁿ - yⁿ)/n!
    let (mut px, mut py, mut fact) = (x, y, 1.0);
    let mut sum = 0.0;
    for n in 2..30 {
        let nf = n as f64;
        px *= x;
        py *= y;
        fact *= nf;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let t = sign * (1.0 - nf) * (px - py) / fact;
        sum += t;
        if t.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `(2 + 2x + x²) e^{-x}` minus the same at `y`.
fn phi2_difference(x: f64, y: f64) -> f64 {
    if x.max(y) > 0.5 {
        return (2.0 + 2.0 * x + x * x) * (-x).exp() - (2.0 + 2.0 * y + y * y) * (-y).exp();
    }
    let (mut px, mut py, mut fact) = (x * x, y * y, 2.0);
    let mut sum = 0.0;
    for n in 3..30 {
        let nf = n as f64;
        px *= x;
        py *= y;
        fact *= nf;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let t = sign * (nf - 1.0) * (nf - 2.0) * (px - py) / fact;
        sum += t;
        if t.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Exterior-minus-interior combinations entering the weakly singular kernel.
///
/// For media 0 (outside) and 1 (inside):
/// `hessian = ∂∂g₀ - ∂∂g₁`, `g = ε₀μ₀g₀ - ε₁μ₁g₁`,
/// `grad_h = μ₀∇g₀ - μ₁∇g₁` and `grad_e = ε₀∇g₀ - ε₁∇g₁`.
/// The `1/r³` parts cancel in `hessian`; it is evaluated without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDifference {
    pub hessian: Matrix3<f64>,
    pub g: f64,
    pub grad_h: Vector3<f64>,
    pub grad_e: Vector3<f64>,
}

impl KernelDifference {
    pub fn at(dr: &Vector3<f64>, kappa: f64, outside: MediumResponse, inside: MediumResponse) -> Self {
        let r = dr.norm();
        let rh = dr / r;
        let (x0, x1) = (kappa * outside.index() * r, kappa * inside.index() * r);
        let c = 1.0 / (4.0 * PI * r * r * r);
        let d2 = phi2_difference(x0, x1) * c;
        let d1_over_r = -phi1_difference(x0, x1) * c;
        let rr = rh * rh.transpose();
        let hessian = rr * d2 + (Matrix3::identity() - rr) * d1_over_r;
        let (e0, e1) = ((-x0).exp(), (-x1).exp());
        let g = (outside.product() * e0 - inside.product() * e1) / (4.0 * PI * r);
        let g1_0 = -(1.0 + x0) * e0 * c * r;
        let g1_1 = -(1.0 + x1) * e1 * c * r;
        KernelDifference {
            hessian,
            g,
            grad_h: rh * (outside.mu * g1_0 - inside.mu * g1_1),
            grad_e: rh * (outside.epsilon * g1_0 - inside.epsilon * g1_1),
        }
    }
}
