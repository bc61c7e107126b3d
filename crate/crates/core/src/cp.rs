//! Casimir-Polder interaction of a polarizable particle above a plate.
//!
//! The plate fills `z < 0`, the particle sits at height `z₀` in medium 0.
//! The scattering Green tensor at the particle is assembled from the plate
//! operators per plane-wave mode: the dipole field is converted into surface
//! currents, multiplied by `(1 - K₁₁)⁻¹` (or its Neumann truncation) and
//! propagated back to the particle.

use std::cell::RefCell;
use std::f64::consts::PI;

use nalgebra::{Complex, Matrix3, Matrix4, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::mse::{exact_inverse, matsubara_sum_par, neumann_inverse, zero_temperature_integral, MatsubaraConfig};
use crate::plates::{plate_blocks_with, PlateMedia};
use crate::quad::{integrate_semi_infinite_vec, QuadratureConfig};
use crate::statics::static_cp_n0_term;
use crate::types::{CoefficientChoice, EnergyBreakdown, Inverse, MaterialModel, MediumResponse, MseOrder, Temperature, Wavenumber};

type C64 = Complex<f64>;

/// Single-oscillator isotropic polarizabilities
/// `α(iξ) = α₀/(1 + κ²/ω_a²)`, `β(iξ) = β₀/(1 + κ²/ω_b²)`.
///
/// An infinite resonance wavenumber gives a constant polarizability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polarizability {
    pub alpha0: f64,
    pub omega_a: f64,
    pub beta0: f64,
    pub omega_b: f64,
}

impl Polarizability {
    pub fn electric(alpha0: f64, omega_a: f64) -> Result<Self> {
        Polarizability { alpha0, omega_a, beta0: 0.0, omega_b: f64::INFINITY }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.alpha0 >= 0.0 && self.beta0 >= 0.0) || !self.alpha0.is_finite() || !self.beta0.is_finite() {
            return Err(invalid("polarizability", "alpha0 and beta0 must be finite and non-negative"));
        }
        if !(self.omega_a > 0.0 && self.omega_b > 0.0) {
            return Err(invalid("polarizability", "resonance wavenumbers must be positive"));
        }
        Ok(self)
    }

    pub fn alpha(&self, kappa: f64) -> f64 {
        self.alpha0 / (1.0 + (kappa / self.omega_a).powi(2))
    }

    pub fn beta(&self, kappa: f64) -> f64 {
        self.beta0 / (1.0 + (kappa / self.omega_b).powi(2))
    }
}

/// Diagonal of the scattering Green tensor at the particle.
///
/// `ee_diag = (Γ^EE_xx, Γ^EE_zz)` with `Γ_yy = Γ_xx`; likewise `hh_diag`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCoincident {
    pub ee_diag: [f64; 2],
    pub hh_diag: [f64; 2],
    pub abs_error: f64,
    pub converged: bool,
}

impl GammaCoincident {
    pub fn trace_ee(&self) -> f64 {
        2.0 * self.ee_diag[0] + self.ee_diag[1]
    }

    pub fn trace_hh(&self) -> f64 {
        2.0 * self.hh_diag[0] + self.hh_diag[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Plate {
    Medium(MediumResponse),
    Perfect,
}

fn cross(v: &Vector3<C64>) -> Matrix3<C64> {
    let z = C64::new(0.0, 0.0);
    Matrix3::new(z, -v.z, v.y, v.z, z, -v.x, -v.y, v.x, z)
}

fn complex4(m: &Matrix4<f64>) -> Matrix4<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// `n̂ × v` restricted to the tangential components, `n̂ = +ẑ`.
fn n_cross(v: &Vector3<C64>) -> [C64; 2] {
    [-v.y, v.x]
}

/// Integrand of one plane-wave mode: `(Γ^EE_xx, Γ^EE_zz, Γ^HH_xx, Γ^HH_zz)`
/// before the `k dk/(2π)` measure.
fn mode_gamma(k: f64, kappa: f64, z0: f64, o: MediumResponse, plate: Plate, inverse: Inverse) -> Result<[f64; 4]> {
    let s0 = (o.product() * kappa * kappa + k * k).sqrt();
    let g = (-s0 * z0).exp() / (2.0 * s0);
    let ik = C64::new(0.0, k);
    let real = |x: f64| C64::new(x, 0.0);
    let din = Vector3::new(ik, real(0.0), real(s0));
    let dout = Vector3::new(ik, real(0.0), real(-s0));
    let id = Matrix3::<C64>::identity();
    let dyad = |d: &Vector3<C64>, chi: f64, other: f64| (d * d.transpose() / real(chi * kappa) - id * real(other * kappa)) * real(g);

    let (p, m_weights) = match plate {
        Plate::Medium(i) => {
            // self block in the same (Nx-rotated) basis as the incident currents
            let media = PlateMedia { medium0: o, body1: i, body2: i };
            let c1 = CoefficientChoice::C1.resolve(0, o, i)?;
            let kb = plate_blocks_with([k, 0.0], Wavenumber::new(kappa)?, z0, &media, [c1, c1])?.k11;
            let p = match inverse {
                Inverse::Exact => exact_inverse(&kb).ok_or(Error::SingularSelfOperator(1))?.0,
                Inverse::Neumann(l) => neumann_inverse(&kb, l).0,
            };
            (p, (2.0 * o.mu / (o.mu + i.mu), -2.0 * o.epsilon / (o.epsilon + i.epsilon)))
        }
        Plate::Perfect => (Matrix4::identity(), (2.0, 0.0)),
    };
    let p = complex4(&p);

    let incident = |e_in: &Matrix3<C64>, h_in: &Matrix3<C64>| {
        let mut m = SMatrix::<C64, 4, 3>::zeros();
        for c in 0..3 {
            let h = n_cross(&h_in.column(c).into_owned());
            let e = n_cross(&e_in.column(c).into_owned());
            m[(0, c)] = h[0] * m_weights.0;
            m[(1, c)] = h[1] * m_weights.0;
            m[(2, c)] = e[0] * m_weights.1;
            m[(3, c)] = e[1] * m_weights.1;
        }
        m
    };
    let outgoing = |from_j: &Matrix3<C64>, from_m: &Matrix3<C64>| {
        let mut g = SMatrix::<C64, 3, 4>::zeros();
        g.fixed_view_mut::<3, 2>(0, 0).copy_from(&from_j.fixed_view::<3, 2>(0, 0));
        g.fixed_view_mut::<3, 2>(0, 2).copy_from(&from_m.fixed_view::<3, 2>(0, 0));
        g
    };

    let curl_in = cross(&din) * real(g);
    let curl_out = cross(&dout) * real(g);
    // electric dipole: E = G^EE c, H = G^HE c; read back E = G^EE j + G^EH m
    let fe = outgoing(&dyad(&dout, o.epsilon, o.mu), &(-curl_out)) * p * incident(&dyad(&din, o.epsilon, o.mu), &curl_in);
    // magnetic dipole: E = G^EH c, H = G^HH c; read back H = G^HE j + G^HH m
    let fh = outgoing(&curl_out, &dyad(&dout, o.mu, o.epsilon)) * p * incident(&(-curl_in), &dyad(&din, o.mu, o.epsilon));
    Ok([
        0.5 * (fe[(0, 0)].re + fe[(1, 1)].re),
        fe[(2, 2)].re,
        0.5 * (fh[(0, 0)].re + fh[(1, 1)].re),
        fh[(2, 2)].re,
    ])
}

/// Coincident scattering Green tensor of a plate at height `z0` and κ > 0.
///
/// Only the intra-plate Neumann order of `order` matters; `Exact` uses the
/// full inverse and `MSE_k0` keeps the single-scattering term.
pub fn gamma_plate_coincident(
    z0: f64,
    kappa: Wavenumber,
    plate: &MaterialModel,
    medium0: &MaterialModel,
    order: MseOrder,
    cfg: &QuadratureConfig,
) -> Result<GammaCoincident> {
    require_positive("z0", z0)?;
    if kappa.is_zero() {
        return Err(Error::StaticLimit("coincident Green tensor"));
    }
    let o = medium0.evaluate(kappa)?;
    let surface = if plate.is_perfect_conductor() { Plate::Perfect } else { Plate::Medium(plate.evaluate(kappa)?) };
    let kap = kappa.value();
    let error = RefCell::new(None);
    let r = integrate_semi_infinite_vec(
        4,
        |k, out| match mode_gamma(k, kap, z0, o, surface, order.inverse()) {
            Ok(v) => {
                for (o, v) in out.iter_mut().zip(v) {
                    *o = k * v / (2.0 * PI);
                }
            }
            Err(e) => {
                error.borrow_mut().get_or_insert(e);
                out.iter_mut().for_each(|x| *x = 0.0);
            }
        },
        kap.max(1.0 / z0),
        cfg,
    );
    if let Some(e) = error.into_inner() {
        return Err(e);
    }
    Ok(GammaCoincident {
        ee_diag: [r.value[0], r.value[1]],
        hh_diag: [r.value[2], r.value[3]],
        abs_error: r.abs_error,
        converged: r.converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpConfig {
    pub z0: f64,
    pub plate: MaterialModel,
    pub medium0: MaterialModel,
    pub temperature: Temperature,
    pub order: MseOrder,
    pub quadrature: QuadratureConfig,
    pub matsubara: MatsubaraConfig,
}

impl CpConfig {
    pub fn new(z0: f64, plate: MaterialModel, temperature: Temperature, order: MseOrder) -> Self {
        CpConfig {
            z0,
            plate,
            medium0: MaterialModel::VACUUM,
            temperature,
            order,
            quadrature: QuadratureConfig::default(),
            matsubara: MatsubaraConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpResult {
    pub value: f64,
    pub breakdown: Option<EnergyBreakdown>,
    pub abs_error: f64,
    pub converged: bool,
}

/// `-4π κ [α tr Γ^EE + β tr Γ^HH]` at one κ > 0.
fn cp_term(particle: &Polarizability, cfg: &CpConfig, kappa: Wavenumber) -> Result<(f64, bool)> {
    let k = kappa.value();
    let g = gamma_plate_coincident(cfg.z0, kappa, &cfg.plate, &cfg.medium0, cfg.order, &cfg.quadrature)?;
    Ok((-4.0 * PI * k * (particle.alpha(k) * g.trace_ee() + particle.beta(k) * g.trace_hh()), g.converged))
}

/// Casimir-Polder energy `-4πτ Σ'ₙ κₙ [α tr Γ^EE + β tr Γ^HH]`.
///
/// The n = 0 term comes from the static image tensor; at T = 0 the sum
/// becomes `-2 ∫ dκ κ [...]`.
pub fn cp_energy(particle: &Polarizability, cfg: &CpConfig) -> Result<CpResult> {
    particle.validated()?;
    require_positive("z0", cfg.z0)?;
    cfg.quadrature.validated()?;
    if particle.alpha0 == 0.0 && particle.beta0 == 0.0 {
        return Ok(CpResult { value: 0.0, breakdown: None, abs_error: 0.0, converged: true });
    }
    match cfg.temperature {
        Temperature::Thermal(tau) => {
            require_positive("temperature", tau)?;
            let term0 = static_cp_n0_term(particle, cfg.z0, &cfg.plate, &cfg.medium0)?;
            let failure = std::sync::Mutex::new(None);
            let inner_ok = std::sync::atomic::AtomicBool::new(true);
            let b = matsubara_sum_par(
                |kappa| {
                    if kappa.is_zero() {
                        return term0;
                    }
                    match cp_term(particle, cfg, kappa) {
                        Ok((v, ok)) => {
                            if !ok {
                                inner_ok.store(false, std::sync::atomic::Ordering::Relaxed);
                            }
                            v
                        }
                        Err(e) => {
                            failure.lock().unwrap().get_or_insert(e);
                            0.0
                        }
                    }
                },
                tau,
                &cfg.matsubara,
            );
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(e);
            }
            let converged = b.converged && inner_ok.into_inner();
            Ok(CpResult { value: b.total, abs_error: b.tail_estimate, converged, breakdown: Some(b) })
        }
        Temperature::Zero => {
            let error = RefCell::new(None);
            let inner_ok = RefCell::new(true);
            let r = zero_temperature_integral(
                |k| match cp_term(particle, cfg, Wavenumber::new(k).expect("quadrature nodes are finite")) {
                    Ok((v, ok)) => {
                        *inner_ok.borrow_mut() &= ok;
                        v
                    }
                    Err(e) => {
                        error.borrow_mut().get_or_insert(e);
                        0.0
                    }
                },
                1.0 / cfg.z0,
                &cfg.quadrature,
            );
            if let Some(e) = error.into_inner() {
                return Err(e);
            }
            Ok(CpResult { value: r.value, breakdown: None, abs_error: r.abs_error, converged: r.converged && inner_ok.into_inner() })
        }
    }
}
