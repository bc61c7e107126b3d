//! Zero-frequency formulation in terms of surface charges.
//!
//! At κ = 0 the current equations degenerate and the field is carried by the
//! surface charge densities of the electric and magnetic problems. Both obey
//! a second-kind equation with the double-layer kernel
//! `2 c ∂_{n(u)} g₀(u - u')`, where `c = (χ₀ - χ_σ)/(χ₀ + χ_σ)` and `χ` is
//! the permittivity (electric charges) or permeability (magnetic charges).

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::mse::real_eigenvalues;
use crate::special::{polylog3, GaussLegendre};
use crate::types::MaterialModel;

/// `(χ₀ - χ_σ)/(χ₀ + χ_σ)`, the static kernel prefactor of one body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticContrast(f64);

impl StaticContrast {
    pub const ZERO: StaticContrast = StaticContrast(0.0);

    pub fn new(chi_outside: f64, chi_inside: f64) -> Result<Self> {
        require_positive("chi_outside", chi_outside)?;
        require_positive("chi_inside", chi_inside)?;
        Ok(StaticContrast((chi_outside - chi_inside) / (chi_outside + chi_inside)))
    }

    /// Contrast from a raw value in `[-1, 1]`.
    pub fn from_value(value: f64) -> Result<Self> {
        if !(value.abs() <= 1.0) {
            return Err(invalid("contrast", format!("must lie in [-1, 1], got {value}")));
        }
        Ok(StaticContrast(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Static reflection coefficient `(χ_σ - χ₀)/(χ_σ + χ₀)`.
    pub fn reflection(self) -> f64 {
        -self.0
    }
}

/// Static electric and magnetic contrasts of a body in a medium.
///
/// Conductors (Drude, plasma, perfect) screen static electric fields, which
/// is the limit `ε_σ → ∞`. A perfect conductor also expels static magnetic
/// fields, the limit `μ_σ → 0`.
pub fn static_contrasts(medium0: &MaterialModel, body: &MaterialModel) -> Result<(StaticContrast, StaticContrast)> {
    let (eps0, mu0) = match *medium0 {
        MaterialModel::Fixed { epsilon, mu } => (epsilon, mu),
        _ => return Err(invalid("medium0", "the static formulation needs a non-conducting medium with fixed ε, μ")),
    };
    let electric = match body.static_epsilon() {
        Some(eps) => StaticContrast::new(eps0, eps)?,
        None => StaticContrast(-1.0),
    };
    let magnetic = match body.static_mu() {
        Some(mu) => StaticContrast::new(mu0, mu)?,
        None => StaticContrast(1.0),
    };
    Ok((electric, magnetic))
}

/// Static surface geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StaticShape {
    Sphere { radius: f64 },
    /// Two parallel planes at separation `distance`; charges are plane waves.
    PlanePair { distance: f64 },
}

/// Surface charges on a discretized surface, or one plane-wave mode per plane.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceChargeDensity {
    Nodes { nodes: Vec<Vector3<f64>>, weights: Vec<f64>, values: Vec<f64> },
    /// `σ_p(x) = amplitudes[p] e^{i k·x}` on plane `p`.
    PlaneWave { k: f64, amplitudes: [f64; 2] },
}

/// Product grid on a sphere: Gauss-Legendre in `cos θ`, uniform in `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub radius: f64,
    pub cos_theta: Vec<f64>,
    pub theta_weights: Vec<f64>,
    pub n_phi: usize,
}

impl SphereGrid {
    pub const DEFAULT_N_THETA: usize = 64;

    /// `n_theta` latitudes and `2 n_theta` longitudes.
    pub fn new(radius: f64, n_theta: usize) -> Result<Self> {
        require_positive("radius", radius)?;
        if n_theta < 2 {
            return Err(invalid("n_theta", "need at least 2 latitudes"));
        }
        let gl = GaussLegendre::new(n_theta);
        Ok(SphereGrid { radius, cos_theta: gl.nodes.clone(), theta_weights: gl.weights.clone(), n_phi: 2 * n_theta })
    }

    pub fn len(&self) -> usize {
        self.cos_theta.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dphi(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    pub fn node(&self, a: usize, q: usize) -> Vector3<f64> {
        let ct = self.cos_theta[a];
        let st = (1.0 - ct * ct).sqrt();
        let phi = self.dphi() * q as f64;
        Vector3::new(st * phi.cos(), st * phi.sin(), ct) * self.radius
    }

    /// Nodes and weights in latitude-major order.
    pub fn nodes_and_weights(&self) -> (Vec<Vector3<f64>>, Vec<f64>) {
        let r2 = self.radius * self.radius;
        let mut nodes = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for a in 0..self.cos_theta.len() {
            for q in 0..self.n_phi {
                nodes.push(self.node(a, q));
                weights.push(r2 * self.theta_weights[a] * self.dphi());
            }
        }
        (nodes, weights)
    }

    /// Charge density sampled from `f(node)`.
    pub fn sample(&self, f: impl Fn(&Vector3<f64>) -> f64) -> SurfaceChargeDensity {
        let (nodes, weights) = self.nodes_and_weights();
        let values = nodes.iter().map(f).collect();
        SurfaceChargeDensity::Nodes { nodes, weights, values }
    }
}

/// Relative tolerance of the weight-sum and on-surface checks.
const GEOMETRY_TOL: f64 = 1e-9;

/// `2 c ∂_{n(u)} g₀(u - u')` on a sphere of radius `R`: `-c/(4πR|u - u'|)`.
fn sphere_kernel(c: f64, radius: f64, dist: f64) -> f64 {
    -c / (4.0 * PI * radius * dist)
}

/// Applies the static double-layer kernel to a charge density.
///
/// On the sphere the weakly singular kernel is integrated with singularity
/// subtraction, using `∫ dA'/|u - u'| = 4πR` exactly. For a plane pair the
/// self kernel vanishes and the cross kernel of a plane-wave mode is
/// `c e^{-kd}`.
pub fn static_kernel_apply(
    shape: StaticShape,
    contrast: StaticContrast,
    charge: &SurfaceChargeDensity,
) -> Result<SurfaceChargeDensity> {
    let c = contrast.value();
    match (shape, charge) {
        (StaticShape::Sphere { radius }, SurfaceChargeDensity::Nodes { nodes, weights, values }) => {
            require_positive("radius", radius)?;
            if nodes.len() != weights.len() || nodes.len() != values.len() {
                return Err(Error::GeometryMismatch);
            }
            if nodes.iter().any(|u| (u.norm() - radius).abs() > GEOMETRY_TOL * radius) {
                return Err(Error::GeometryMismatch);
            }
            check_weight_sum(weights, 4.0 * PI * radius * radius)?;
            let out = nodes
                .iter()
                .zip(values)
                .map(|(u, &rho_u)| {
                    let mut acc = 0.0;
                    for ((v, &w), &rho_v) in nodes.iter().zip(weights).zip(values) {
                        let dist = (u - v).norm();
                        if dist > 0.0 {
                            acc += w * sphere_kernel(c, radius, dist) * (rho_v - rho_u);
                        }
                    }
                    acc - c * rho_u
                })
                .collect();
            Ok(SurfaceChargeDensity::Nodes { nodes: nodes.clone(), weights: weights.clone(), values: out })
        }
        (StaticShape::PlanePair { distance }, SurfaceChargeDensity::PlaneWave { k, amplitudes }) => {
            require_positive("distance", distance)?;
            if !(*k >= 0.0) {
                return Err(invalid("k", "must be non-negative"));
            }
            let e = (-k * distance).exp();
            Ok(SurfaceChargeDensity::PlaneWave { k: *k, amplitudes: [c * e * amplitudes[1], c * e * amplitudes[0]] })
        }
        _ => Err(Error::GeometryMismatch),
    }
}

fn check_weight_sum(weights: &[f64], area: f64) -> Result<()> {
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Resolution("quadrature weights must be positive".into()));
    }
    let sum: f64 = weights.iter().sum();
    if ((sum - area) / area).abs() > GEOMETRY_TOL {
        return Err(Error::Resolution(format!("weights sum to {sum}, surface area is {area}")));
    }
    Ok(())
}

/// Nyström matrix of the static sphere kernel restricted to azimuthal order `m`.
///
/// On a product grid the kernel depends on `φ - φ'` only, so each Fourier
/// order decouples into an `n_theta × n_theta` block.
pub fn static_sphere_m_block(grid: &SphereGrid, contrast: StaticContrast, m: usize) -> DMatrix<f64> {
    let c = contrast.value();
    let nt = grid.cos_theta.len();
    let dphi = grid.dphi();
    let r = grid.radius;
    let mut block = DMatrix::zeros(nt, nt);
    let mut diag_sum = vec![0.0; nt];
    for a in 0..nt {
        let u = grid.node(a, 0);
        for b in 0..nt {
            let wb = r * r * grid.theta_weights[b] * dphi;
            let mut fourier = 0.0;
            for q in 0..grid.n_phi {
                if a == b && q == 0 {
                    continue;
                }
                let k = wb * sphere_kernel(c, r, (u - grid.node(b, q)).norm());
                diag_sum[a] += k;
                fourier += k * (m as f64 * dphi * q as f64).cos();
            }
            block[(a, b)] = fourier;
        }
    }
    for a in 0..nt {
        block[(a, a)] += -c - diag_sum[a];
    }
    block
}

/// Largest spread among the `2l + 1` copies of `λ_l`, relative to `|c|`.
const DEGENERACY_TOL: f64 = 1e-3;

/// Per-degree eigenvalues `λ_l`, `l = 0..=l_max`, of the static sphere kernel.
///
/// Each `m`-block contributes its eigenvalues for `l ≥ m` in order of
/// decreasing modulus; the `2l + 1` copies of every `λ_l` must agree,
/// otherwise the grid is reported as under-resolved.
pub fn static_sphere_eigs(l_max: usize, contrast: StaticContrast, grid: &SphereGrid) -> Result<Vec<f64>> {
    let nt = grid.cos_theta.len();
    if l_max + 4 > nt {
        return Err(Error::Resolution(format!("{nt} latitudes cannot resolve degree {l_max}")));
    }
    let mut per_m = Vec::with_capacity(l_max + 1);
    for m in 0..=l_max {
        let ev = real_eigenvalues(static_sphere_m_block(grid, contrast, m))
            .ok_or_else(|| Error::Resolution(format!("eigenvalue iteration did not converge for m = {m}")))?;
        let mut values: Vec<f64> = Vec::with_capacity(nt);
        for v in ev.iter() {
            if v.im.abs() > 1e-8 * contrast.value().abs().max(1e-300) {
                return Err(Error::Resolution(format!("complex static eigenvalue {v}")));
            }
            values.push(v.re);
        }
        values.sort_by(|x, y| y.abs().partial_cmp(&x.abs()).unwrap());
        per_m.push(values);
    }
    let scale = contrast.value().abs();
    let mut out = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let reference = per_m[0][l];
        for (m, values) in per_m.iter().enumerate().take(l + 1).skip(1) {
            let v = values[l - m];
            if (v - reference).abs() > DEGENERACY_TOL * scale.max(1e-300) {
                return Err(Error::Resolution(format!("degree {l}: m = 0 gives {reference}, m = {m} gives {v}")));
            }
        }
        out.push(reference);
    }
    Ok(out)
}

/// Static reflection coefficients `(r_j, r_m)` of a plate in a medium.
pub fn static_reflections(medium0: &MaterialModel, body: &MaterialModel) -> Result<(f64, f64)> {
    let (e, m) = static_contrasts(medium0, body)?;
    Ok((e.reflection(), m.reflection()))
}

/// `Σ_{p=1}^{powers} x^p/p³`, or `Li₃(x)` when `powers` is `None`.
pub fn partial_polylog3(x: f64, powers: Option<usize>) -> f64 {
    match powers {
        None => polylog3(x),
        Some(n) => {
            let mut xp = 1.0;
            let mut sum = 0.0;
            for p in 1..=n {
                xp *= x;
                sum += xp / (p as f64).powi(3);
            }
            sum
        }
    }
}

/// Unweighted n = 0 plate term `Σ_p ∫ k dk/(2π) ln(1 - r₁⁽ᵖ⁾r₂⁽ᵖ⁾ e^{-2kd})`.
///
/// Equal to `-Σ_p Li₃(r₁⁽ᵖ⁾r₂⁽ᵖ⁾)/(8πd²)`; with `powers = Some(k + 1)` the
/// logarithm is expanded to that many round trips.
pub fn static_plate_n0_term(reflections: [(f64, f64); 2], distance: f64, powers: Option<usize>) -> Result<f64> {
    require_positive("distance", distance)?;
    let (r1, r2) = (reflections[0], reflections[1]);
    let li = partial_polylog3(r1.0 * r2.0, powers) + partial_polylog3(r1.1 * r2.1, powers);
    Ok(-li / (8.0 * PI * distance * distance))
}

/// `-∂/∂d` of [`static_plate_n0_term`].
pub fn static_plate_n0_force_term(reflections: [(f64, f64); 2], distance: f64, powers: Option<usize>) -> Result<f64> {
    Ok(2.0 * static_plate_n0_term(reflections, distance, powers)? / distance)
}

/// Classical n = 0 energy per area, `(τ/2)` times [`static_plate_n0_term`].
pub fn static_plate_n0_energy(config: &crate::plates::PlateConfig) -> Result<f64> {
    let tau = config.temperature.thermal_wavenumber();
    let r = [static_reflections(&config.medium0, &config.body1)?, static_reflections(&config.medium0, &config.body2)?];
    Ok(0.5 * tau * static_plate_n0_term(r, config.distance, None)?)
}

/// Static image-type coincident Green tensor `lim κΓ` above a plate.
///
/// Components `(xx = yy, zz)` for reflection `r` and medium response `χ₀`
/// (`ε₀` for the electric, `μ₀` for the magnetic block):
/// `xx = r/(32πχ₀z₀³)`, `zz = r/(16πχ₀z₀³)`.
pub fn static_gamma_plate(z0: f64, reflection: f64, chi0: f64) -> Result<[f64; 2]> {
    require_positive("z0", z0)?;
    let base = reflection / (32.0 * PI * chi0 * z0.powi(3));
    Ok([base, 2.0 * base])
}

/// Classical n = 0 Casimir-Polder energy `-2πτ [α(0) tr Γ̃^EE + β(0) tr Γ̃^HH]`.
pub fn static_cp_n0(
    particle: &crate::cp::Polarizability,
    z0: f64,
    plate: &MaterialModel,
    medium0: &MaterialModel,
    tau: f64,
) -> Result<f64> {
    Ok(0.5 * tau * static_cp_n0_term(particle, z0, plate, medium0)?)
}

/// Unweighted n = 0 Casimir-Polder term, `-4π [α(0) tr Γ̃^EE + β(0) tr Γ̃^HH]`.
pub fn static_cp_n0_term(
    particle: &crate::cp::Polarizability,
    z0: f64,
    plate: &MaterialModel,
    medium0: &MaterialModel,
) -> Result<f64> {
    let (r_j, r_m) = static_reflections(medium0, plate)?;
    let (eps0, mu0) = match *medium0 {
        MaterialModel::Fixed { epsilon, mu } => (epsilon, mu),
        _ => unreachable!("static_reflections accepts fixed media only"),
    };
    let ge = static_gamma_plate(z0, r_j, eps0)?;
    let gh = static_gamma_plate(z0, r_m, mu0)?;
    let tr = |g: [f64; 2]| 2.0 * g[0] + g[1];
    Ok(-4.0 * PI * (particle.alpha0 * tr(ge) + particle.beta0 * tr(gh)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_semi_infinite, QuadratureConfig};

    #[test]
    fn contrast_values() {
        let c = StaticContrast::new(1.0, 3.0).unwrap();
        assert!((c.value() + 0.5).abs() < 1e-15);
        assert!((c.reflection() - 0.5).abs() < 1e-15);
        assert!(StaticContrast::new(1.0, -3.0).is_err());
        assert!(StaticContrast::from_value(1.5).is_err());
        let (e, m) = static_contrasts(&MaterialModel::VACUUM, &MaterialModel::PerfectConductor).unwrap();
        assert_eq!((e.reflection(), m.reflection()), (1.0, -1.0));
        let drude = MaterialModel::Drude { omega_p: 1.0, gamma: 0.1, mu: 1.0 };
        assert_eq!(static_reflections(&MaterialModel::VACUUM, &drude).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn sphere_apply_constant_and_zero_contrast() {
        let grid = SphereGrid::new(1.3, 16).unwrap();
        let ones = grid.sample(|_| 1.0);
        let c = StaticContrast::new(1.0, 3.0).unwrap();
        let SurfaceChargeDensity::Nodes { values, .. } = static_kernel_apply(StaticShape::Sphere { radius: 1.3 }, c, &ones).unwrap() else {
            panic!("node density expected")
        };
        assert!(values.iter().all(|v| (v + c.value()).abs() < 1e-14));
        let z = grid.sample(|u| u.x * u.z + 2.0);
        let SurfaceChargeDensity::Nodes { values, .. } =
            static_kernel_apply(StaticShape::Sphere { radius: 1.3 }, StaticContrast::ZERO, &z).unwrap()
        else {
            panic!("node density expected")
        };
        assert!(values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sphere_apply_dipole_eigenfunction() {
        // cos θ is a degree-1 harmonic: eigenvalue -c/3
        let grid = SphereGrid::new(1.0, 32).unwrap();
        let c = StaticContrast::new(1.0, 5.0).unwrap();
        let f = grid.sample(|u| u.z);
        let SurfaceChargeDensity::Nodes { nodes, values, .. } = static_kernel_apply(StaticShape::Sphere { radius: 1.0 }, c, &f).unwrap() else {
            panic!("node density expected")
        };
        let worst = nodes.iter().zip(&values).map(|(u, v)| (v + c.value() / 3.0 * u.z).abs()).fold(0.0, f64::max);
        assert!(worst < 2e-3, "{worst}");
    }

    #[test]
    fn geometry_checks() {
        let bad = SurfaceChargeDensity::Nodes { nodes: vec![Vector3::new(1.0, 0.0, 0.0)], weights: vec![1.0], values: vec![1.0] };
        assert!(matches!(
            static_kernel_apply(StaticShape::Sphere { radius: 1.0 }, StaticContrast::ZERO, &bad),
            Err(Error::Resolution(_))
        ));
        let pw = SurfaceChargeDensity::PlaneWave { k: 1.0, amplitudes: [1.0, 0.0] };
        assert_eq!(static_kernel_apply(StaticShape::Sphere { radius: 1.0 }, StaticContrast::ZERO, &pw), Err(Error::GeometryMismatch));
    }

    #[test]
    fn plane_pair_round_trip() {
        let c = StaticContrast::from_value(-0.4).unwrap();
        let shape = StaticShape::PlanePair { distance: 2.0 };
        let s = SurfaceChargeDensity::PlaneWave { k: 0.5, amplitudes: [1.0, 0.0] };
        let once = static_kernel_apply(shape, c, &s).unwrap();
        let twice = static_kernel_apply(shape, c, &once).unwrap();
        let SurfaceChargeDensity::PlaneWave { amplitudes, .. } = twice else { panic!() };
        assert!((amplitudes[0] - 0.16 * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn sphere_spectrum_degrees() {
        let grid = SphereGrid::new(1.0, 24).unwrap();
        let c = StaticContrast::new(1.0, 3.0).unwrap();
        let ev = static_sphere_eigs(6, c, &grid).unwrap();
        for (l, v) in ev.iter().enumerate() {
            let exact = -c.value() / (2 * l + 1) as f64;
            assert!((v - exact).abs() < 1e-3, "l = {l}: {v} vs {exact}");
        }
        assert!(static_sphere_eigs(30, c, &grid).is_err());
    }

    #[test]
    fn plate_n0_closed_form_matches_quadrature() {
        let r = [(0.6, 0.2), (0.9, -0.3)];
        let d = 1.7;
        let cfg = QuadratureConfig::with_rel_tol(1e-13);
        let q = integrate_semi_infinite(
            |k| {
                let x = (-2.0 * k * d).exp();
                k / (2.0 * PI) * ((-r[0].0 * r[1].0 * x).ln_1p() + (-r[0].1 * r[1].1 * x).ln_1p())
            },
            1.0 / d,
            &cfg,
        );
        let closed = static_plate_n0_term(r, d, None).unwrap();
        assert!(((q.value - closed) / closed).abs() < 1e-11);
        let h = 1e-4;
        let fd = -(static_plate_n0_term(r, d + h, None).unwrap() - static_plate_n0_term(r, d - h, None).unwrap()) / (2.0 * h);
        assert!((fd - static_plate_n0_force_term(r, d, None).unwrap()).abs() < 1e-8);
        assert!((partial_polylog3(0.3, Some(60)) - polylog3(0.3)).abs() < 1e-15);
        assert_eq!(static_plate_n0_term([(0.0, 0.0), (0.5, 0.5)], d, None).unwrap(), 0.0);
    }

    #[test]
    fn static_gamma_power_law() {
        let a = static_gamma_plate(1.0, 1.0, 1.0).unwrap();
        let b = static_gamma_plate(2.0, 1.0, 1.0).unwrap();
        assert!(((a[0] + a[0] + a[1]) / (b[0] + b[0] + b[1]) - 8.0).abs() < 1e-13);
    }
}
