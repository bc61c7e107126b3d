//! Sphere of radius `R` in a uniform medium.
//!
//! Rotational symmetry makes `K` diagonal in the partial-wave index `l` and
//! independent of the azimuthal index. Each `l` carries a 4×4 block acting on
//! `(j_X, j_{n×X}, m_X, m_{n×X})`, the current coefficients along the
//! transverse harmonics `X_lm` and `n̂ × X_lm`.
//!
//! Internally the blocks are built in the gradient basis `(Ψ, Φ)` with
//! `Ψ = R ∇Y_lm` and `Φ = r̂ × Ψ`. Since `X ∝ Φ` and `n̂ × X ∝ -Ψ`, the public
//! coefficients are `(c_Φ, -c_Ψ)`.

use nalgebra::{Complex, Matrix2, Matrix4, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::greens::KernelDifference;
use crate::special::{spherical_products, GaussLegendre};
use crate::types::{MaterialModel, MediumResponse, PolarizationBlock, Wavenumber};

type C64 = Complex<f64>;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereConfig {
    pub radius: f64,
    pub material: MaterialModel,
    pub medium0: MediumResponse,
}

impl SphereConfig {
    pub fn new(radius: f64, material: MaterialModel, medium0: MediumResponse) -> Result<Self> {
        SphereConfig { radius, material, medium0 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        require_positive("radius", self.radius)?;
        self.material.validated()?;
        Ok(self)
    }

    /// Interior response at `κ = κR/R`.
    fn inside(&self, kappa_r: f64) -> Result<MediumResponse> {
        self.material.evaluate(Wavenumber::new(kappa_r / self.radius)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereMethod {
    /// Closed form from spherical-wave expansions of both Green functions.
    AdditionTheorem,
    /// Direct surface quadrature with [`SphereQuadrature::default`].
    Quadrature,
}

/// One partial wave of the sphere operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalBlock {
    pub l: usize,
    pub block: PolarizationBlock,
    /// Always true for the closed form; for quadrature, whether a coarser
    /// grid reproduces the block to `1e-10`.
    pub converged: bool,
}

fn check_inputs(l: usize, kappa_r: f64) -> Result<()> {
    if l == 0 {
        return Err(invalid("l", "transverse modes start at l = 1"));
    }
    require_positive("kappa_r", kappa_r)?;
    Ok(())
}

/// Gradient basis `(Ψ, Φ)` to `(X, n̂×X)`, per current type.
fn to_public_basis(k: &Matrix4<f64>) -> Matrix4<f64> {
    let p = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    p * k * p.transpose()
}

/// Closed-form block in the gradient basis.
///
/// With `x_σ = κR√(ε_σμ_σ)` and the products `S, P, Q` of
/// [`spherical_products`]:
/// `K^EE = a diag(1, -1)`, `K^HH = b diag(1, -1)` where
/// `a = 2(μ₀S₀ - μ₁S₁)/(μ₀+μ₁)`, `b = 2(ε₀S₀ - ε₁S₁)/(ε₀+ε₁)`, and
/// `K^EH = 2/(μ₀+μ₁) [[0, κR(ε₀μ₀P₀ - ε₁μ₁P₁)], [(Q₀ - Q₁)/κR, 0]]`,
/// `K^HE = -(μ₀+μ₁)/(ε₀+ε₁) K^EH`.
fn analytic_gradient_block(l: usize, kappa_r: f64, o: MediumResponse, i: MediumResponse) -> Matrix4<f64> {
    let p0 = spherical_products(l, kappa_r * o.index());
    let p1 = spherical_products(l, kappa_r * i.index());
    let a = 2.0 * (o.mu * p0.s - i.mu * p1.s) / (o.mu + i.mu);
    let b = 2.0 * (o.epsilon * p0.s - i.epsilon * p1.s) / (o.epsilon + i.epsilon);
    let eh = Matrix2::new(
        0.0,
        kappa_r * (o.product() * p0.p - i.product() * p1.p),
        (p0.q - p1.q) / kappa_r,
        0.0,
    ) * (2.0 / (o.mu + i.mu));
    let he = eh * (-(o.mu + i.mu) / (o.epsilon + i.epsilon));
    PolarizationBlock::from_blocks(Matrix2::new(a, 0.0, 0.0, -a), eh, he, Matrix2::new(b, 0.0, 0.0, -b)).0
}

/// The 4×4 block of partial wave `l` at dimensionless frequency `κR`.
///
/// Perfect conductors have no magnetic currents; use [`pc_sphere_block`].
pub fn sphere_sso_block(l: usize, kappa_r: f64, config: &SphereConfig, method: SphereMethod) -> Result<SphericalBlock> {
    check_inputs(l, kappa_r)?;
    let inside = config.inside(kappa_r)?;
    match method {
        SphereMethod::AdditionTheorem => Ok(SphericalBlock {
            l,
            block: PolarizationBlock(to_public_basis(&analytic_gradient_block(l, kappa_r, config.medium0, inside))),
            converged: true,
        }),
        SphereMethod::Quadrature => sphere_quadrature_block(l, kappa_r, config.medium0, inside, &SphereQuadrature::default()),
    }
}

/// Eigenvalues of one block, sorted by decreasing modulus.
///
/// They come in `(λ, -λ)` pairs.
pub fn sphere_eigs(l: usize, kappa_r: f64, config: &SphereConfig) -> Result<[C64; 4]> {
    Ok(sphere_sso_block(l, kappa_r, config, SphereMethod::AdditionTheorem)?.block.eigenvalues())
}

/// `±(√(ε_σμ_σ) - √(ε₀μ₀))/√((μ_σ+μ₀)(ε_σ+ε₀))`, the κ → ∞ eigenvalues.
pub fn high_freq_eig_limit(medium0: MediumResponse, medium: MediumResponse) -> (f64, f64) {
    let v = (medium.index() - medium0.index()) / ((medium.mu + medium0.mu) * (medium.epsilon + medium0.epsilon)).sqrt();
    (v, -v)
}

/// Perfect-conductor block on `(j_X, j_{n×X})`: `diag(-2S₀, 2S₀)`.
pub fn pc_sphere_block(l: usize, kappa_r: f64, medium0: MediumResponse) -> Result<Matrix2<f64>> {
    check_inputs(l, kappa_r)?;
    let s0 = spherical_products(l, kappa_r * medium0.index()).s;
    Ok(Matrix2::new(-2.0 * s0, 0.0, 0.0, 2.0 * s0))
}

/// Resolution of the surface quadrature.
///
/// Sources are placed at geodesic angle `γ = 2β` and bearing `ψ` around the
/// target point. With `|u - u'| = 2R sin β` the area element is
/// `dA = 2R |u - u'| cos β dβ dψ`, which cancels the `1/|u - u'|`
/// singularity. `β` uses Gauss-Legendre nodes on `[0, π/2]`, `ψ` a uniform
/// grid whose `(ψ, ψ + π)` pairs cancel the odd `1/|u - u'|²` remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereQuadrature {
    pub n_beta: usize,
    pub n_psi: usize,
    /// Azimuthal index of the test harmonics, `≤ l`.
    pub azimuthal: usize,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        SphereQuadrature { n_beta: 60, n_psi: 64, azimuthal: 0 }
    }
}

/// Target point of the projection, away from the poles.
const TARGET: (f64, f64) = (1.0, 0.3);

/// `(P_l^m, dP_l^m/dθ)` at `θ`, without the Condon-Shortley phase.
fn legendre(l: usize, m: usize, theta: f64) -> (f64, f64) {
    let (x, s) = (theta.cos(), theta.sin());
    let mut pmm = 1.0;
    for j in 0..m {
        pmm *= (2 * j + 1) as f64 * s;
    }
    let (mut prev, mut cur) = (0.0, pmm);
    for n in m + 1..=l {
        let next = ((2 * n - 1) as f64 * x * cur - (n + m - 1) as f64 * prev) / (n - m) as f64;
        prev = cur;
        cur = next;
    }
    // (x² - 1) dP/dx = l x P_l - (l + m) P_{l-1}
    let dtheta = (l as f64 * x * cur - (l + m) as f64 * prev) / s;
    (cur, dtheta)
}

struct Frame {
    r: Vector3<f64>,
    theta: Vector3<f64>,
    phi: Vector3<f64>,
}

fn frame(theta: f64, phi: f64) -> Frame {
    let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
    Frame {
        r: Vector3::new(st * cp, st * sp, ct),
        theta: Vector3::new(ct * cp, ct * sp, -st),
        phi: Vector3::new(-sp, cp, 0.0),
    }
}

/// `(θ̂, φ̂)` components of `Ψ = R∇Y_lm`; `Φ = r̂ × Ψ` has components `(-Ψ_φ, Ψ_θ)`.
fn psi_components(l: usize, m: usize, theta: f64, phi: f64) -> [C64; 2] {
    let (p, dp) = legendre(l, m, theta);
    let e = C64::from_polar(1.0, m as f64 * phi);
    [e * dp, e * C64::new(0.0, m as f64 * p / theta.sin())]
}

fn to_cartesian(f: &Frame, c: [C64; 2]) -> Vector3<C64> {
    f.theta.map(re) * c[0] + f.phi.map(re) * c[1]
}

fn real_cross(a: &Vector3<f64>, v: &Vector3<C64>) -> Vector3<C64> {
    Vector3::new(
        a.y * v.z - a.z * v.y,
        a.z * v.x - a.x * v.z,
        a.x * v.y - a.y * v.x,
    )
}

fn quadrature_pass(l: usize, kappa_r: f64, o: MediumResponse, i: MediumResponse, q: &SphereQuadrature) -> Result<Matrix4<C64>> {
    let m = q.azimuthal;
    let (th0, ph0) = TARGET;
    let target = frame(th0, ph0);
    let gl = GaussLegendre::new(q.n_beta);
    let w_psi = 2.0 * std::f64::consts::PI / q.n_psi as f64;
    // columns: sources jΨ, jΦ, mΨ, mΦ; rows of h, e: accumulated fields
    let mut h = [Vector3::<C64>::zeros(); 4];
    let mut e = [Vector3::<C64>::zeros(); 4];
    let kap = kappa_r;
    for (beta, wb) in gl.on(0.0, std::f64::consts::FRAC_PI_2) {
        let gamma = 2.0 * beta;
        let dist = 2.0 * beta.sin();
        let w_beta = wb * w_psi * 2.0 * beta.cos() * dist;
        for n in 0..q.n_psi {
            let psi = n as f64 * w_psi;
            let dir = target.theta * psi.cos() + target.phi * psi.sin();
            let up = target.r * gamma.cos() + dir * gamma.sin();
            let (th, ph) = (up.z.clamp(-1.0, 1.0).acos(), up.y.atan2(up.x));
            let f = frame(th, ph);
            let psi_c = psi_components(l, m, th, ph);
            let sources = [
                to_cartesian(&f, psi_c),
                to_cartesian(&f, [-psi_c[1], psi_c[0]]),
            ];
            // u - u' with 1 - cos γ = 2 sin²β, exact as β → 0
            let dr = target.r * (2.0 * beta.sin().powi(2)) - dir * gamma.sin();
            let kd = KernelDifference::at(&dr, kap, o, i);
            let hess = kd.hessian.map(re);
            let (w, inv_k, kg) = (re(w_beta), re(1.0 / kap), re(kap * kd.g));
            for (s, c) in sources.iter().enumerate() {
                // j sources: μ-weighted H^E difference and -ε₀G^EE + ε₁G^EE
                h[s] += real_cross(&kd.grad_h, c) * w;
                e[s] += (-(hess * c) * inv_k + c * kg) * w;
                // m sources: μ-weighted G^HH difference and ε-weighted G^EH difference
                h[s + 2] += ((hess * c) * inv_k - c * kg) * w;
                e[s + 2] += real_cross(&kd.grad_e, c) * w;
            }
        }
    }
    // project n̂ × field onto (Ψ, Φ) at the target by solving in (θ̂, φ̂)
    let pu = psi_components(l, m, th0, ph0);
    let basis = Matrix2::new(pu[0], -pu[1], pu[1], pu[0]);
    let inv = basis.try_inverse().ok_or_else(|| Error::Resolution("degenerate harmonic at the target point".into()))?;
    let mut out = Matrix4::<C64>::zeros();
    for col in 0..4 {
        let j = real_cross(&target.r, &h[col]) * re(2.0 / (o.mu + i.mu));
        let mm = real_cross(&target.r, &e[col]) * re(2.0 / (o.epsilon + i.epsilon));
        for (row0, v) in [(0, j), (2, mm)] {
            let comps = Vector2::new(v.dot(&target.theta.map(re)), v.dot(&target.phi.map(re)));
            let c = inv * comps;
            out[(row0, col)] = c[0];
            out[(row0 + 1, col)] = c[1];
        }
    }
    Ok(out)
}

/// Quadrature block for explicit media and resolution.
///
/// The projected block is real up to quadrature error; the imaginary part is
/// folded into the convergence check.
pub fn sphere_quadrature_block(
    l: usize,
    kappa_r: f64,
    medium0: MediumResponse,
    inside: MediumResponse,
    q: &SphereQuadrature,
) -> Result<SphericalBlock> {
    check_inputs(l, kappa_r)?;
    if q.azimuthal > l {
        return Err(invalid("azimuthal", format!("must not exceed l = {l}")));
    }
    if q.n_beta < 4 || q.n_psi < 4 || !q.n_psi.is_multiple_of(2) {
        return Err(invalid("quadrature", "need n_beta ≥ 4 and an even n_psi ≥ 4"));
    }
    let fine = quadrature_pass(l, kappa_r, medium0, inside, q)?;
    let coarse_q = SphereQuadrature { n_beta: q.n_beta * 3 / 4, n_psi: (q.n_psi * 3 / 8) * 2, azimuthal: q.azimuthal };
    let coarse = quadrature_pass(l, kappa_r, medium0, inside, &coarse_q)?;
    let re = fine.map(|z| z.re);
    let scale = re.amax().max(1.0);
    let imag = fine.map(|z| z.im).amax();
    let converged = (fine - coarse).map(|z| z.norm()).amax() < 1e-10 * scale && imag < 1e-10 * scale;
    Ok(SphericalBlock { l, block: PolarizationBlock(to_public_basis(&re)), converged })
}
