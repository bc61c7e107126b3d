//! Infinite circular cylinder of radius `R` along `ẑ`.
//!
//! Translation and rotation symmetry make `K` diagonal in the angular index
//! `m` and the axial wavenumber `k_z`. All quantities are evaluated in units
//! of `R`, so only `κR` and `k_zR` enter. Public blocks act on
//! `(j_z, j_φ, m_z, m_φ)`.
//!
//! Fields of one cylindrical mode are written through the matrix
//! `M(Z)` mapping the amplitudes `(e, h)` of the two potentials onto the
//! surface components `(E_φ, E_z, H_φ, H_z)`:
//!
//! ```text
//! M = [[a Z, -κμ Z'/p], [Z, 0], [κε Z'/p, a Z], [0, Z]],   a = k_z m/p²
//! ```
//!
//! with `Z = I_m(pR)` inside and `Z = K_m(pR)` outside, all exponentially
//! scaled. Surface values only enter through ratios, so the scaling cancels.

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::mse::{exact_inverse, neumann_inverse};
use crate::quad::{integrate_vec, QuadratureConfig};
use crate::special::{bessel_k01_scaled, cyl_bessel_scaled, k1_pole_remainder};
use crate::types::{Inverse, MaterialModel, MediumResponse, PolarizationBlock, Wavenumber};

type C64 = Complex<f64>;
type Matrix4x2 = SMatrix<f64, 4, 2>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderConfig {
    pub radius: f64,
    pub material: MaterialModel,
    #[serde(default)]
    pub medium0: MediumResponse,
}

impl CylinderConfig {
    pub fn new(radius: f64, material: MaterialModel, medium0: MediumResponse) -> Result<Self> {
        CylinderConfig { radius, material, medium0 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        require_positive("radius", self.radius)?;
        self.material.validated()?;
        Ok(self)
    }

    fn inside(&self, kappa_r: f64) -> Result<MediumResponse> {
        self.material.evaluate(Wavenumber::new(kappa_r / self.radius)?)
    }
}

fn check_inputs(kappa_r: f64, kz_r: f64) -> Result<()> {
    require_positive("kappa_r", kappa_r)?;
    if !kz_r.is_finite() {
        return Err(invalid("kz_r", "must be finite"));
    }
    Ok(())
}

/// `T[out, in]` over `(E, H)`, stored as `T e^{-2p₀R}` with `log_scale = 2p₀R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TBlock {
    pub m: usize,
    pub scaled: Matrix2<f64>,
    pub log_scale: f64,
}

impl TBlock {
    pub fn ee(&self) -> f64 {
        self.scaled[(0, 0)]
    }

    pub fn eh(&self) -> f64 {
        self.scaled[(0, 1)]
    }

    pub fn he(&self) -> f64 {
        self.scaled[(1, 0)]
    }

    pub fn hh(&self) -> f64 {
        self.scaled[(1, 1)]
    }

    /// Unscaled entries; overflow to infinity for large `p₀R`.
    pub fn value(&self) -> Matrix2<f64> {
        self.scaled * self.log_scale.exp()
    }
}

/// Scale-free quantities of the closed-form T-matrix, all in units of `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylIntermediates {
    /// `p₀R = √(κ² + k_z²) R`
    pub p0: f64,
    /// `p₁R = √(εμκ² + k_z²) R`
    pub p1: f64,
    /// Polarization coupling `m k_z/(√(εμ) κR²) (1/p₁² - 1/p₀²)`.
    pub coupling: f64,
    pub delta: [f64; 4],
}

/// Intermediates of the closed form; the medium outside must be vacuum.
pub fn cyl_intermediates(m: usize, kappa_r: f64, kz_r: f64, config: &CylinderConfig) -> Result<CylIntermediates> {
    check_inputs(kappa_r, kz_r)?;
    if config.medium0 != MediumResponse::VACUUM {
        return Err(invalid("medium0", "the closed-form T-matrix assumes vacuum outside; use t_mode_matching"));
    }
    let i = config.inside(kappa_r)?;
    Ok(intermediates(m, kappa_r, kz_r, i))
}

fn intermediates(m: usize, kappa_r: f64, kz_r: f64, i: MediumResponse) -> CylIntermediates {
    let p0 = kappa_r.hypot(kz_r);
    let p1 = (i.product() * kappa_r * kappa_r + kz_r * kz_r).sqrt();
    let (b0, b1) = (cyl_bessel_scaled(m, p0), cyl_bessel_scaled(m, p1));
    let coupling = m as f64 * kz_r / (i.index() * kappa_r) * (1.0 / (p1 * p1) - 1.0 / (p0 * p0));
    let inner = b1.di / (p1 * b1.i);
    let (k_ratio, i_ratio) = (b0.dk / (p0 * b0.k), b0.di / (p0 * b0.i));
    CylIntermediates {
        p0,
        p1,
        coupling,
        delta: [
            inner - k_ratio / i.epsilon,
            inner - k_ratio / i.mu,
            inner - i_ratio / i.epsilon,
            inner - i_ratio / i.mu,
        ],
    }
}

/// Closed-form T-matrix of a cylinder in vacuum.
///
/// `T^EE = -(I_m/K_m)(Δ₂Δ₃ + K²)/D`, `T^HH = -(I_m/K_m)(Δ₁Δ₄ + K²)/D` and
/// `T^HE = -T^EH = K/(√(εμ)(p₀R)² K_m²)/D` with `D = Δ₁Δ₂ + K²`; Bessel
/// functions at `p₀R`.
pub fn t_exact(m: usize, kappa_r: f64, kz_r: f64, config: &CylinderConfig) -> Result<TBlock> {
    let c = cyl_intermediates(m, kappa_r, kz_r, config)?;
    let i = config.inside(kappa_r)?;
    let b0 = cyl_bessel_scaled(m, c.p0);
    let [d1, d2, d3, d4] = c.delta;
    let k2 = c.coupling * c.coupling;
    let den = d1 * d2 + k2;
    let ratio = b0.i / b0.k;
    let ee = -ratio * (d2 * d3 + k2) / den;
    let hh = -ratio * (d1 * d4 + k2) / den;
    let he = c.coupling / (i.index() * c.p0 * c.p0 * b0.k * b0.k) / den;
    Ok(TBlock { m, scaled: Matrix2::new(ee, -he, he, hh), log_scale: 2.0 * c.p0 })
}

/// `M(Z)` for one medium; see the module docs.
fn mode_matrix(z: f64, dz: f64, p: f64, kappa_r: f64, kz_r: f64, m: usize, med: MediumResponse) -> Matrix4x2 {
    let a = kz_r * m as f64 / (p * p);
    Matrix4x2::new(
        a * z, -kappa_r * med.mu * dz / p, //
        z, 0.0, //
        kappa_r * med.epsilon * dz / p, a * z, //
        0.0, z,
    )
}

struct ModeMatrices {
    regular: Matrix4x2,
    outgoing: Matrix4x2,
}

fn mode_matrices(m: usize, kappa_r: f64, kz_r: f64, med: MediumResponse) -> ModeMatrices {
    let p = (med.product() * kappa_r * kappa_r + kz_r * kz_r).sqrt();
    let b = cyl_bessel_scaled(m, p);
    ModeMatrices {
        regular: mode_matrix(b.i, b.di, p, kappa_r, kz_r, m, med),
        outgoing: mode_matrix(b.k, b.dk, p, kappa_r, kz_r, m, med),
    }
}

fn hstack(a: &Matrix4x2, b: &Matrix4x2) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    out.fixed_view_mut::<4, 2>(0, 0).copy_from(a);
    out.fixed_view_mut::<4, 2>(0, 2).copy_from(b);
    out
}

fn singular(what: &str) -> Error {
    Error::Resolution(format!("singular {what} matrix"))
}

/// T-matrix by matching regular and outgoing waves at the surface.
///
/// Valid for any outer medium; in vacuum it reproduces [`t_exact`].
pub fn t_mode_matching(m: usize, kappa_r: f64, kz_r: f64, config: &CylinderConfig) -> Result<TBlock> {
    check_inputs(kappa_r, kz_r)?;
    let (o, i) = (config.medium0, config.inside(kappa_r)?);
    let outer = mode_matrices(m, kappa_r, kz_r, o);
    let inner = mode_matrices(m, kappa_r, kz_r, i);
    let lu = hstack(&inner.regular, &(-outer.outgoing)).lu();
    let mut t = Matrix2::zeros();
    for col in 0..2 {
        let sol = lu.solve(&outer.regular.column(col).into_owned()).ok_or_else(|| singular("mode-matching"))?;
        t[(0, col)] = sol[2];
        t[(1, col)] = sol[3];
    }
    Ok(TBlock { m, scaled: t, log_scale: 2.0 * (o.product() * kappa_r * kappa_r + kz_r * kz_r).sqrt() })
}

/// `(j_φ, j_z, m_φ, m_z) ↦` jumps of `(E_φ, E_z, H_φ, H_z)` across the surface.
const JUMP: Matrix4<f64> = Matrix4::new(
    0.0, 0.0, 0.0, -1.0, //
    0.0, 0.0, 1.0, 0.0, //
    0.0, 1.0, 0.0, 0.0, //
    -1.0, 0.0, 0.0, 0.0,
);

/// Surface-averaged fields `(E_φ, E_z, H_φ, H_z)` radiated into a homogeneous
/// medium by currents `(j_φ, j_z, m_φ, m_z)` on the cylinder.
fn radiated_average(m: usize, kappa_r: f64, kz_r: f64, med: MediumResponse) -> Result<Matrix4<f64>> {
    let mm = mode_matrices(m, kappa_r, kz_r, med);
    let a = JUMP * hstack(&mm.outgoing, &(-mm.regular));
    let inv = a.try_inverse().ok_or_else(|| singular("current-to-field"))?;
    Ok(hstack(&mm.outgoing, &mm.regular) * inv * 0.5)
}

/// `n̂ × (v_φ, v_z) = (-v_z, v_φ)` with `n̂ = r̂`.
const N_CROSS: Matrix2<f64> = Matrix2::new(0.0, -1.0, 1.0, 0.0);

/// Closed-form block on `(j_φ, j_z, m_φ, m_z)`.
fn analytic_block_phi_z(m: usize, kappa_r: f64, kz_r: f64, o: MediumResponse, i: MediumResponse) -> Result<Matrix4<f64>> {
    let r0 = radiated_average(m, kappa_r, kz_r, o)?;
    let r1 = radiated_average(m, kappa_r, kz_r, i)?;
    let (e0, h0) = (r0.fixed_view::<2, 4>(0, 0), r0.fixed_view::<2, 4>(2, 0));
    let (e1, h1) = (r1.fixed_view::<2, 4>(0, 0), r1.fixed_view::<2, 4>(2, 0));
    let mut k = Matrix4::zeros();
    k.fixed_view_mut::<2, 4>(0, 0).copy_from(&(N_CROSS * (h0 * o.mu - h1 * i.mu) * (2.0 / (o.mu + i.mu))));
    k.fixed_view_mut::<2, 4>(2, 0).copy_from(&(N_CROSS * (e1 * i.epsilon - e0 * o.epsilon) * (2.0 / (o.epsilon + i.epsilon))));
    Ok(k)
}

/// `(φ, z)` to `(z, φ)` ordering within each current type.
const SWAP: Matrix4<f64> = Matrix4::new(
    0.0, 1.0, 0.0, 0.0, //
    1.0, 0.0, 0.0, 0.0, //
    0.0, 0.0, 0.0, 1.0, //
    0.0, 0.0, 1.0, 0.0,
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CylinderMethod {
    /// Cylindrical-wave expansions of both Green functions.
    Analytic,
    /// Angular quadrature of the axially transformed kernel.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalBlock {
    pub m: usize,
    pub kz_r: f64,
    pub block: PolarizationBlock,
    pub converged: bool,
}

/// The 4×4 block of mode `(m, k_z)` at dimensionless `κR`, `k_zR`.
pub fn cyl_sso_block(m: usize, kappa_r: f64, kz_r: f64, config: &CylinderConfig, method: CylinderMethod) -> Result<CylindricalBlock> {
    check_inputs(kappa_r, kz_r)?;
    let (o, i) = (config.medium0, config.inside(kappa_r)?);
    let (k, converged) = match method {
        CylinderMethod::Analytic => (analytic_block_phi_z(m, kappa_r, kz_r, o, i)?, true),
        CylinderMethod::Quadrature => quadrature_block_phi_z(m, kappa_r, kz_r, o, i, &QuadratureConfig::with_rel_tol(1e-12))?,
    };
    Ok(CylindricalBlock { m, kz_r, block: PolarizationBlock(SWAP * k * SWAP), converged })
}

/// Eigenvalues of the analytic block, sorted by decreasing modulus.
pub fn cyl_eigs(m: usize, kappa_r: f64, kz_r: f64, config: &CylinderConfig) -> Result<[C64; 4]> {
    Ok(cyl_sso_block(m, kappa_r, kz_r, config, CylinderMethod::Analytic)?.block.eigenvalues())
}

/// T-matrix approximant from the truncated (or exact) inverse of `1 - K`.
///
/// A regular wave induces the currents `[2μ₀/(μ₀+μ₁) n̂×H, -2ε₀/(ε₀+ε₁) n̂×E]`;
/// the scattered currents are then decomposed into outgoing waves with the
/// same normalization as [`t_mode_matching`], so `Inverse::Exact`
/// reproduces the exact T-matrix.
pub fn mse_t(m: usize, kappa_r: f64, kz_r: f64, config: &CylinderConfig, inverse: Inverse) -> Result<TBlock> {
    check_inputs(kappa_r, kz_r)?;
    let (o, i) = (config.medium0, config.inside(kappa_r)?);
    let k = PolarizationBlock(analytic_block_phi_z(m, kappa_r, kz_r, o, i)?);
    let p = match inverse {
        Inverse::Exact => exact_inverse(&k).ok_or(Error::SingularSelfOperator(1))?.0,
        Inverse::Neumann(order) => neumann_inverse(&k, order).0,
    };
    let outer = mode_matrices(m, kappa_r, kz_r, o);
    let decompose = (JUMP * hstack(&outer.outgoing, &(-outer.regular))).lu();
    let (wm, we) = (2.0 * o.mu / (o.mu + i.mu), -2.0 * o.epsilon / (o.epsilon + i.epsilon));
    let mut t = Matrix2::zeros();
    for col in 0..2 {
        let f = outer.regular.column(col);
        let h = N_CROSS * nalgebra::Vector2::new(f[2], f[3]) * wm;
        let e = N_CROSS * nalgebra::Vector2::new(f[0], f[1]) * we;
        let currents = p * nalgebra::Vector4::new(h[0], h[1], e[0], e[1]);
        let u = decompose.solve(&currents).ok_or_else(|| singular("current-to-field"))?;
        t[(0, col)] = u[0];
        t[(1, col)] = u[1];
    }
    Ok(TBlock { m, scaled: t, log_scale: 2.0 * (o.product() * kappa_r * kappa_r + kz_r * kz_r).sqrt() })
}

/// Media-weighted differences of the axially transformed kernel at one
/// source point, free of the `1/ρ²` cancellation.
///
/// With `g̃ = K₀(pρ)/(2π)` the transverse derivatives are written through
/// `xK₁(x) - 1`, whose `O(x² ln x)` size keeps differences accurate.
struct AxialKernelDifference {
    /// `∂∂g̃₀ - ∂∂g̃₁`, with `∂_z → i k_z`
    hessian: Matrix3<C64>,
    /// `ε₀μ₀g̃₀ - ε₁μ₁g̃₁`
    g: f64,
    /// `μ₀∇g̃₀ - μ₁∇g̃₁`
    grad_h: Vector3<C64>,
    /// `ε₀∇g̃₀ - ε₁∇g̃₁`
    grad_e: Vector3<C64>,
}

fn k0(x: f64) -> f64 {
    bessel_k01_scaled(x).0 * (-x).exp()
}

impl AxialKernelDifference {
    fn at(rv: &Vector3<f64>, kappa_r: f64, kz_r: f64, o: MediumResponse, i: MediumResponse) -> Self {
        let rho = rv.x.hypot(rv.y);
        let rh = Vector3::new(rv.x / rho, rv.y / rho, 0.0);
        let p = |med: MediumResponse| (med.product() * kappa_r * kappa_r + kz_r * kz_r).sqrt();
        let (p0, p1) = (p(o), p(i));
        let (x0, x1) = (p0 * rho, p1 * rho);
        let (k00, k01) = (k0(x0), k0(x1));
        let (rem0, rem1) = (k1_pole_remainder(x0), k1_pole_remainder(x1));
        let tp = 2.0 * PI;
        let g_diff = (k00 - k01) / tp;
        let gp_diff = -(rem0 - rem1) / (tp * rho);
        let gpp_diff = (p0 * p0 * k00 - p1 * p1 * k01 + (rem0 - rem1) / (rho * rho)) / tp;
        let gp = |rem: f64| -(1.0 + rem) / (tp * rho);
        let (gp0, gp1) = (gp(rem0), gp(rem1));

        let rr = rh * rh.transpose();
        let it = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0));
        let zh = Vector3::z();
        let real = rr * gpp_diff + (it - rr) * (gp_diff / rho) - zh * zh.transpose() * (kz_r * kz_r * g_diff);
        let mixed = (rh * zh.transpose() + zh * rh.transpose()) * (kz_r * gp_diff);
        let hessian = Matrix3::from_fn(|a, b| C64::new(real[(a, b)], mixed[(a, b)]));
        let grad = |w0: f64, w1: f64| {
            let t = w0 * gp0 - w1 * gp1;
            Vector3::new(C64::new(t * rh.x, 0.0), C64::new(t * rh.y, 0.0), C64::new(0.0, kz_r * (w0 * k00 - w1 * k01) / tp))
        };
        AxialKernelDifference {
            hessian,
            g: (o.product() * k00 - i.product() * k01) / tp,
            grad_h: grad(o.mu, i.mu),
            grad_e: grad(o.epsilon, i.epsilon),
        }
    }
}

fn cross_c(a: &Vector3<C64>, b: &Vector3<C64>) -> Vector3<C64> {
    Vector3::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x)
}

/// Quadrature block on `(j_φ, j_z, m_φ, m_z)`.
///
/// The axial integral is done analytically, leaving the 2D Green function
/// `K₀(pρ)/(2π)` on the circle. The remaining integral over the source angle
/// has logarithmic endpoint singularities and is evaluated adaptively.
fn quadrature_block_phi_z(
    m: usize,
    kappa_r: f64,
    kz_r: f64,
    o: MediumResponse,
    i: MediumResponse,
    cfg: &QuadratureConfig,
) -> Result<(Matrix4<f64>, bool)> {
    let c = |x: f64| C64::new(x, 0.0);
    let n = Vector3::new(1.0, 0.0, 0.0).map(c);
    let (wj, wm) = (2.0 / (o.mu + i.mu), 2.0 / (o.epsilon + i.epsilon));
    let integrand = |phi: f64, weight: f64, out: &mut [f64]| {
        // u - u' with 1 - cos φ = 2 sin²(φ/2), exact as φ → 0
        let h = (0.5 * phi).sin();
        let rv = Vector3::new(2.0 * h * h, -phi.sin(), 0.0);
        if rv.norm() == 0.0 {
            return;
        }
        let kd = AxialKernelDifference::at(&rv, kappa_r, kz_r, o, i);
        let phase = C64::from_polar(weight, m as f64 * phi);
        let sources = [Vector3::new(-phi.sin(), phi.cos(), 0.0).map(c) * phase, Vector3::z().map(c) * phase];
        for (s, src) in sources.iter().enumerate() {
            let hs = kd.hessian * src;
            let kg = c(kappa_r * kd.g);
            // j source: (H, E) combos; m source likewise
            let fields = [
                (cross_c(&kd.grad_h, src), -hs / c(kappa_r) + src * kg),
                (hs / c(kappa_r) - src * kg, cross_c(&kd.grad_e, src)),
            ];
            for (kind, (h, e)) in fields.iter().enumerate() {
                let j = cross_c(&n, h) * c(wj);
                let mm = cross_c(&n, e) * c(wm);
                let col = 2 * kind + s;
                for (row, v) in [j.y, j.z, mm.y, mm.z].iter().enumerate() {
                    out[2 * (4 * row + col)] += v.re;
                    out[2 * (4 * row + col) + 1] += v.im;
                }
            }
        }
    };
    // φ = ±π t⁴ flattens the logarithmic singularity at the target point
    let r = integrate_vec(
        32,
        |t, out| {
            out.iter_mut().for_each(|v| *v = 0.0);
            let (phi, jac) = (PI * t.powi(4), 4.0 * PI * t.powi(3));
            integrand(phi, jac, out);
            integrand(-phi, jac, out);
        },
        0.0,
        1.0,
        cfg,
    );
    let k = Matrix4::from_fn(|row, col| r.value[2 * (4 * row + col)]);
    let imag = (0..16).map(|q| r.value[2 * q + 1].abs()).fold(0.0, f64::max);
    let converged = r.converged && imag < 1e-10 * k.amax().max(1.0);
    Ok((k, converged))
}
