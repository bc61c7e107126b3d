//! Two parallel plates in a plane-wave basis.
//!
//! Plate 1 fills `z < 0`, plate 2 fills `z > d` and the gap holds medium 0.
//! Both surfaces use the tangential basis `(x̂, ŷ)`, so block rows read
//! `(j_x, j_y, m_x, m_y)`. Unless a function takes an explicit in-plane
//! vector, `k∥ = (k, 0)`; per-mode determinants do not depend on its
//! direction.

use std::cell::RefCell;
use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::mse::{
    logdet_one_minus, matsubara_sum_par, resolvent_trace, round_trip_split, truncated_logdet, zero_temperature_integral,
    MatsubaraConfig,
};
use crate::quad::{integrate_semi_infinite, QuadratureConfig};
use crate::statics::{static_plate_n0_force_term, static_plate_n0_term, static_reflections};
use crate::types::{
    CoefficientChoice, Coefficients, EnergyBreakdown, Inverse, MaterialModel, MediumResponse, MseOrder,
    PolarizationBlock, Temperature, Wavenumber,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Body {
    One,
    Two,
}

/// `K12` carries currents of plate 2 onto plate 1, `K21` the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossDirection {
    K12,
    K21,
}

/// Medium responses of the gap and both plates at one κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateMedia {
    pub medium0: MediumResponse,
    pub body1: MediumResponse,
    pub body2: MediumResponse,
}

impl PlateMedia {
    pub fn body(&self, body: Body) -> MediumResponse {
        match body {
            Body::One => self.body1,
            Body::Two => self.body2,
        }
    }
}

fn s_of(m: MediumResponse, kappa: f64, k2: f64) -> f64 {
    (m.product() * kappa * kappa + k2).sqrt()
}

/// `s_σ = √(ε_σμ_σκ² + k²)` for the gap and both plates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveQuantities {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
}

impl PlaneWaveQuantities {
    pub fn new(k: f64, kappa: Wavenumber, media: &PlateMedia) -> Self {
        let (kap, k2) = (kappa.value(), k * k);
        PlaneWaveQuantities { s0: s_of(media.medium0, kap, k2), s1: s_of(media.body1, kap, k2), s2: s_of(media.body2, kap, k2) }
    }
}

/// Reflection coefficients of a half space at imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FresnelPair {
    pub r_tm: f64,
    pub r_te: f64,
}

impl FresnelPair {
    pub const PERFECT_CONDUCTOR: FresnelPair = FresnelPair { r_tm: 1.0, r_te: -1.0 };

    pub fn new(k: f64, kappa: Wavenumber, outside: MediumResponse, inside: MediumResponse) -> Self {
        let (kap, k2) = (kappa.value(), k * k);
        let (s0, s1) = (s_of(outside, kap, k2), s_of(inside, kap, k2));
        FresnelPair {
            r_tm: (inside.epsilon * s0 - outside.epsilon * s1) / (inside.epsilon * s0 + outside.epsilon * s1),
            r_te: (inside.mu * s0 - outside.mu * s1) / (inside.mu * s0 + outside.mu * s1),
        }
    }
}

/// `1 - a e^{-2s₀d}`, written as `(1 - a) + a(1 - e^{-2s₀d})` where
/// the product is close to 1 and the direct difference would cancel.
fn one_minus_reflected(a: f64, s0d: f64) -> f64 {
    let ax = a * (-2.0 * s0d).exp();
    if ax < 0.5 {
        1.0 - ax
    } else {
        (1.0 - a) - a * (-2.0 * s0d).exp_m1()
    }
}

/// `ln(1 - a e^{-2s₀d})`, accurate at both ends.
fn ln_one_minus_reflected(a: f64, s0d: f64) -> f64 {
    let ax = a * (-2.0 * s0d).exp();
    if ax < 0.5 {
        (-ax).ln_1p()
    } else {
        one_minus_reflected(a, s0d).ln()
    }
}

/// `ln(1 - r₁ᵀᴹr₂ᵀᴹe^{-2s₀d}) + ln(1 - r₁ᵀᴱr₂ᵀᴱe^{-2s₀d})`.
pub fn lifshitz_mode(r1: FresnelPair, r2: FresnelPair, s0: f64, d: f64) -> f64 {
    ln_one_minus_reflected(r1.r_tm * r2.r_tm, s0 * d) + ln_one_minus_reflected(r1.r_te * r2.r_te, s0 * d)
}

/// `∂/∂d` of [`lifshitz_mode`].
pub fn lifshitz_mode_derivative(r1: FresnelPair, r2: FresnelPair, s0: f64, d: f64) -> f64 {
    let x = (-2.0 * s0 * d).exp();
    let (a, b) = (r1.r_tm * r2.r_tm, r1.r_te * r2.r_te);
    2.0 * s0 * (a * x / one_minus_reflected(a, s0 * d) + b * x / one_minus_reflected(b, s0 * d))
}

/// `A(x)/κ` with `A(x) = [[-k₁k₂, -xκ² - k₁²], [xκ² + k₂², k₁k₂]]`,
/// divided through so that no `κ²` can underflow.
fn a_over_kappa(x: f64, kv: [f64; 2], kappa: f64) -> Matrix2<f64> {
    let [k1, k2] = kv;
    let (q1, q2) = (k1 / kappa, k2 / kappa);
    Matrix2::new(-k1 * q2, -x * kappa - k1 * q1, x * kappa + k2 * q2, k1 * q2)
}

fn require_dynamic(kappa: Wavenumber, what: &'static str) -> Result<f64> {
    if kappa.is_zero() {
        Err(Error::StaticLimit(what))
    } else {
        Ok(kappa.value())
    }
}

/// Self block `K_σσ` at an arbitrary in-plane vector.
///
/// `K^EE = K^HH = 0`,
/// `K^EH = (-1)^σ/(κ(μ₀+μ_σ)) [A(ε₀μ₀)/s₀ - A(ε_σμ_σ)/s_σ]` and
/// `K^HE = -(μ₀+μ_σ)/(ε₀+ε_σ) K^EH`.
pub fn plate_self_block_at(body: Body, kv: [f64; 2], kappa: Wavenumber, media: &PlateMedia) -> Result<PolarizationBlock> {
    let kap = require_dynamic(kappa, "plate self block")?;
    let (o, i) = (media.medium0, media.body(body));
    let k2 = kv[0] * kv[0] + kv[1] * kv[1];
    let (s0, ss) = (s_of(o, kap, k2), s_of(i, kap, k2));
    let sign = match body {
        Body::One => -1.0,
        Body::Two => 1.0,
    };
    // A(x)/s = [[-k₁k₂, k₂² - s²], [s² - k₁², k₁k₂]]/s, and with
    // Δ = (s_σ - s₀)/κ = κ(ε_σμ_σ - ε₀μ₀)/(s₀ + s_σ) the difference needs no
    // cancellation as κ/k → 0.
    let delta = kap * (i.product() - o.product()) / (s0 + ss);
    let q = delta / (s0 * ss);
    let [k1, k2] = kv;
    let eh = Matrix2::new(-k1 * k2 * q, delta + k2 * k2 * q, -delta - k1 * k1 * q, k1 * k2 * q) * (sign / (o.mu + i.mu));
    let he = eh * (-(o.mu + i.mu) / (o.epsilon + i.epsilon));
    Ok(PolarizationBlock::from_blocks(Matrix2::zeros(), eh, he, Matrix2::zeros()))
}

pub fn plate_self_block(body: Body, k: f64, kappa: Wavenumber, media: &PlateMedia) -> Result<PolarizationBlock> {
    plate_self_block_at(body, [k, 0.0], kappa, media)
}

/// Closed-form doubly degenerate eigenvalues `(λ₊, λ₋)` of a plate self block.
pub fn plate_self_eigs(k: f64, kappa: Wavenumber, outside: MediumResponse, inside: MediumResponse) -> Result<(f64, f64)> {
    let kap = require_dynamic(kappa, "plate self block")?;
    let k2 = k * k;
    let (s0, s1) = (s_of(outside, kap, k2), s_of(inside, kap, k2));
    let num = (s1 - s0) * (inside.product() * s0 - outside.product() * s1);
    let radicand = num / (s0 * s1 * (outside.epsilon + inside.epsilon) * (outside.mu + inside.mu));
    if radicand < 0.0 {
        if radicand > -1e-15 {
            return Ok((0.0, 0.0));
        }
        return Err(Error::NegativeRadicand(radicand));
    }
    let l = radicand.sqrt();
    Ok((l, -l))
}

/// Cross block at an arbitrary in-plane vector.
///
/// With `e = e^{-s₀d}` and `σ` the receiving plate:
/// `K^EE = -μ₀/(μ₀+μ_σ) e 1`, `K^HH = -ε₀/(ε₀+ε_σ) e 1`,
/// `K^EH = ±A(ε₀μ₀) e/((μ₀+μ_σ)κs₀)` and `K^HE = ∓A(ε₀μ₀) e/((ε₀+ε_σ)κs₀)`,
/// upper signs for `K12`.
pub fn plate_cross_block_at(
    direction: CrossDirection,
    kv: [f64; 2],
    kappa: Wavenumber,
    distance: f64,
    media: &PlateMedia,
) -> Result<PolarizationBlock> {
    let kap = require_dynamic(kappa, "plate cross block")?;
    require_positive("distance", distance)?;
    let (body, sign) = match direction {
        CrossDirection::K12 => (media.body1, 1.0),
        CrossDirection::K21 => (media.body2, -1.0),
    };
    let o = media.medium0;
    let s0 = s_of(o, kap, kv[0] * kv[0] + kv[1] * kv[1]);
    let e = (-s0 * distance).exp();
    let a0 = a_over_kappa(o.product(), kv, kap);
    Ok(PolarizationBlock::from_blocks(
        Matrix2::identity() * (-o.mu / (o.mu + body.mu) * e),
        a0 * (sign * e / ((o.mu + body.mu) * s0)),
        a0 * (-sign * e / ((o.epsilon + body.epsilon) * s0)),
        Matrix2::identity() * (-o.epsilon / (o.epsilon + body.epsilon) * e),
    ))
}

pub fn plate_cross_block(
    direction: CrossDirection,
    k: f64,
    kappa: Wavenumber,
    distance: f64,
    media: &PlateMedia,
) -> Result<PolarizationBlock> {
    plate_cross_block_at(direction, [k, 0.0], kappa, distance, media)
}

/// The four blocks of a plate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateBlocks {
    pub k11: PolarizationBlock,
    pub k12: PolarizationBlock,
    pub k22: PolarizationBlock,
    pub k21: PolarizationBlock,
}

/// Blocks for arbitrary inner/outer weights.
///
/// With `n×` the rotation `[[0, -1], [1, 0]]` (negated on plate 2),
/// `kk = k∥k∥ᵀ`, `Hm_X = (-kk/(μ_Xκ) - ε_Xκ)/(2s_X)` and
/// `Ej_X = (-kk/(ε_Xκ) - μ_Xκ)/(2s_X)`:
/// self `K^EH = 2/(cⁱ_H+cᵉ_H) n×(cᵉ_H Hm₀ - cⁱ_H Hm_σ)`,
/// `K^HE = 2/(cⁱ_E+cᵉ_E) n×(cⁱ_E Ej_σ - cᵉ_E Ej₀)`;
/// cross `K^EE = -cᵉ_H/(cⁱ_H+cᵉ_H) e`, `K^HH = -cᵉ_E/(cⁱ_E+cᵉ_E) e`,
/// `K^EH = 2cᵉ_H/(cⁱ_H+cᵉ_H) n× Hm₀ e`, `K^HE = -2cᵉ_E/(cⁱ_E+cᵉ_E) n× Ej₀ e`.
/// The weights of the receiving plate apply.
pub fn plate_blocks_with(
    kv: [f64; 2],
    kappa: Wavenumber,
    distance: f64,
    media: &PlateMedia,
    coefficients: [Coefficients; 2],
) -> Result<PlateBlocks> {
    let kap = require_dynamic(kappa, "plate blocks")?;
    require_positive("distance", distance)?;
    let kk = Matrix2::new(kv[0] * kv[0], kv[0] * kv[1], kv[0] * kv[1], kv[1] * kv[1]);
    let k2 = kk.trace();
    let id = Matrix2::identity();
    let hm = |m: MediumResponse| (kk * (-1.0 / (m.mu * kap)) - id * (m.epsilon * kap)) / (2.0 * s_of(m, kap, k2));
    let ej = |m: MediumResponse| (kk * (-1.0 / (m.epsilon * kap)) - id * (m.mu * kap)) / (2.0 * s_of(m, kap, k2));
    let o = media.medium0;
    let e = (-s_of(o, kap, k2) * distance).exp();
    let nx = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    let build = |body: Body| -> Result<(PolarizationBlock, PolarizationBlock)> {
        let (idx, n) = match body {
            Body::One => (0, nx),
            Body::Two => (1, -nx),
        };
        let c = coefficients[idx].validated()?;
        let i = media.body(body);
        let (sum_h, sum_e) = (c.inner_h + c.outer_h, c.inner_e + c.outer_e);
        let self_block = PolarizationBlock::from_blocks(
            Matrix2::zeros(),
            n * (hm(o) * c.outer_h - hm(i) * c.inner_h) * (2.0 / sum_h),
            n * (ej(i) * c.inner_e - ej(o) * c.outer_e) * (2.0 / sum_e),
            Matrix2::zeros(),
        );
        let cross = PolarizationBlock::from_blocks(
            id * (-c.outer_h / sum_h * e),
            n * hm(o) * (2.0 * c.outer_h / sum_h * e),
            n * ej(o) * (-2.0 * c.outer_e / sum_e * e),
            id * (-c.outer_e / sum_e * e),
        );
        Ok((self_block, cross))
    };
    let (k11, k12) = build(Body::One)?;
    let (k22, k21) = build(Body::Two)?;
    Ok(PlateBlocks { k11, k12, k22, k21 })
}

/// Perfect-conductor blocks acting on electric currents only.
///
/// A flat perfect conductor has a vanishing self block; the cross blocks of
/// `2 n̂ × G₀^HE` reduce to `-e^{-s₀d} 1` on both plates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcPlateBlocks {
    pub self_block: Matrix2<f64>,
    pub k12: Matrix2<f64>,
    pub k21: Matrix2<f64>,
}

pub fn pc_plate_blocks(k: f64, kappa: Wavenumber, distance: f64, medium0: MediumResponse) -> Result<PcPlateBlocks> {
    let kap = require_dynamic(kappa, "perfect-conductor plate blocks")?;
    require_positive("distance", distance)?;
    let e = (-s_of(medium0, kap, k * k) * distance).exp();
    let cross = Matrix2::identity() * -e;
    Ok(PcPlateBlocks { self_block: Matrix2::zeros(), k12: cross, k21: cross })
}

/// Where the Neumann truncation of `MSE_kl` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Plate 1 only; plate 2 keeps its exact inverse.
    #[default]
    BodyOne,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateConfig {
    pub medium0: MaterialModel,
    pub body1: MaterialModel,
    pub body2: MaterialModel,
    pub distance: f64,
    pub temperature: Temperature,
    pub truncation: Truncation,
    pub coefficients: CoefficientChoice,
    pub quadrature: QuadratureConfig,
    pub matsubara: MatsubaraConfig,
}

impl PlateConfig {
    pub fn new(body1: MaterialModel, body2: MaterialModel, distance: f64, temperature: Temperature) -> Self {
        PlateConfig {
            medium0: MaterialModel::VACUUM,
            body1,
            body2,
            distance,
            temperature,
            truncation: Truncation::BodyOne,
            coefficients: CoefficientChoice::C1,
            quadrature: QuadratureConfig::default(),
            matsubara: MatsubaraConfig::default(),
        }
    }

    pub fn validated(&self) -> Result<&Self> {
        require_positive("distance", self.distance)?;
        if self.medium0.is_perfect_conductor() {
            return Err(invalid("medium0", "the gap cannot be a perfect conductor"));
        }
        self.medium0.validated()?;
        self.body1.validated()?;
        self.body2.validated()?;
        self.quadrature.validated()?;
        if let Temperature::Thermal(tau) = self.temperature {
            require_positive("temperature", tau)?;
        }
        Ok(self)
    }
}

/// Energy or pressure per area with convergence information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateResult {
    pub value: f64,
    /// Matsubara terms at finite temperature, `None` at T = 0.
    pub breakdown: Option<EnergyBreakdown>,
    pub abs_error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Surface {
    Medium(MediumResponse),
    Perfect,
}

fn surface_at(model: &MaterialModel, kappa: Wavenumber) -> Result<Surface> {
    if model.is_perfect_conductor() {
        Ok(Surface::Perfect)
    } else {
        Ok(Surface::Medium(model.evaluate(kappa)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quantity {
    Energy,
    Force,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Formulation {
    Fresnel,
    Operator(MseOrder),
}

/// Per-mode integrand at fixed κ > 0: `ln det(1 - N)` (or its truncation),
/// or `-∂/∂d` of it.
struct ModeIntegrand<'a> {
    cfg: &'a PlateConfig,
    kappa: Wavenumber,
    medium0: MediumResponse,
    surfaces: [Surface; 2],
    formulation: Formulation,
    quantity: Quantity,
}

impl<'a> ModeIntegrand<'a> {
    fn new(cfg: &'a PlateConfig, kappa: Wavenumber, formulation: Formulation, quantity: Quantity) -> Result<Self> {
        let medium0 = cfg.medium0.evaluate(kappa)?;
        let surfaces = [surface_at(&cfg.body1, kappa)?, surface_at(&cfg.body2, kappa)?];
        if let Formulation::Operator(_) = formulation {
            if matches!(surfaces, [Surface::Perfect, Surface::Medium(_)] | [Surface::Medium(_), Surface::Perfect]) {
                return Err(invalid("body", "mixed perfect-conductor/dielectric pairs are only supported by the Lifshitz path"));
            }
        }
        Ok(ModeIntegrand { cfg, kappa, medium0, surfaces, formulation, quantity })
    }

    fn fresnel(&self, k: f64, kappa: Wavenumber, s: Surface) -> FresnelPair {
        match s {
            Surface::Medium(m) => FresnelPair::new(k, kappa, self.medium0, m),
            Surface::Perfect => FresnelPair::PERFECT_CONDUCTOR,
        }
    }

    fn eval(&self, k: f64) -> Result<f64> {
        // Each mode depends on κ/s₀, k/s₀ and s₀d only; evaluating at s₀ = 1
        // avoids under- and overflow of κ², k² at the ends of the quadrature.
        let s0 = (self.medium0.product().sqrt() * self.kappa.value()).hypot(k);
        // below MIN_KAPPA_RATIO the mode equals its κ → 0 limit to O(ratio²)
        let kappa = Wavenumber::new((self.kappa.value() / s0).max(MIN_KAPPA_RATIO))?;
        let (k, d) = (k / s0, self.cfg.distance * s0);
        // a body matching the gap scatters nothing; skip the round-off noise
        // that would otherwise stall the adaptive quadrature
        let transparent = self.surfaces.contains(&Surface::Medium(self.medium0));
        if d > UNDERFLOW_EXPONENT || transparent {
            return Ok(0.0);
        }
        let order = match self.formulation {
            Formulation::Fresnel => {
                let (r1, r2) = (self.fresnel(k, kappa, self.surfaces[0]), self.fresnel(k, kappa, self.surfaces[1]));
                return Ok(match self.quantity {
                    Quantity::Energy => lifshitz_mode(r1, r2, 1.0, d),
                    Quantity::Force => -s0 * lifshitz_mode_derivative(r1, r2, 1.0, d),
                });
            }
            Formulation::Operator(order) => order,
        };
        let powers = order.round_trips();
        let n = match self.surfaces {
            [Surface::Medium(b1), Surface::Medium(b2)] => {
                let media = PlateMedia { medium0: self.medium0, body1: b1, body2: b2 };
                let blocks = match self.cfg.coefficients {
                    CoefficientChoice::C1 => PlateBlocks {
                        k11: plate_self_block(Body::One, k, kappa, &media)?,
                        k12: plate_cross_block(CrossDirection::K12, k, kappa, d, &media)?,
                        k22: plate_self_block(Body::Two, k, kappa, &media)?,
                        k21: plate_cross_block(CrossDirection::K21, k, kappa, d, &media)?,
                    },
                    choice => plate_blocks_with(
                        [k, 0.0],
                        kappa,
                        d,
                        &media,
                        [choice.resolve(0, self.medium0, b1)?, choice.resolve(1, self.medium0, b2)?],
                    )?,
                };
                // Cross entries grow like s₀/κ; a diagonal similarity that
                // leaves det(1 - N) and tr Nᵖ unchanged keeps every entry O(1).
                let t = kappa.value();
                let scale = match self.cfg.coefficients {
                    CoefficientChoice::C1 => Matrix4::from_diagonal(&Vector4::new(t, 1.0, t, 1.0)),
                    _ => Matrix4::from_diagonal(&Vector4::new(1.0, t, 1.0, t)),
                };
                let balance = |b: PolarizationBlock| {
                    PolarizationBlock(Matrix4::from_fn(|r, c| b.0[(r, c)] * scale[(r, r)] / scale[(c, c)]))
                };
                let blocks = PlateBlocks {
                    k11: balance(blocks.k11),
                    k12: balance(blocks.k12),
                    k22: balance(blocks.k22),
                    k21: balance(blocks.k21),
                };
                let inner1 = order.inverse();
                let inner2 = match self.cfg.truncation {
                    Truncation::BodyOne => Inverse::Exact,
                    Truncation::Symmetric => order.inverse(),
                };
                round_trip_split(&blocks.k11, &blocks.k12, &blocks.k22, &blocks.k21, inner1, inner2)?.matrix.0
            }
            _ => return Ok(perfect_conductor_mode(s0, self.cfg.distance, powers, self.quantity)),
        };
        Ok(match self.quantity {
            Quantity::Energy => match powers {
                Some(p) => truncated_logdet(&n, p),
                None => logdet_one_minus(&n)?,
            },
            Quantity::Force => -2.0 * s0 * resolvent_trace(&n, powers)?,
        })
    }
}

/// Smallest `κ/s₀` used in a mode; keeps `1/κ` factors finite for subnormal κ.
const MIN_KAPPA_RATIO: f64 = 1e-150;

/// Beyond `s₀d` of this size `e^{-2s₀d}` is below the smallest subnormal.
const UNDERFLOW_EXPONENT: f64 = 400.0;

/// Mode integrand of two perfect conductors, where `N = x·1` on the electric
/// currents with `x = e^{-2s₀d}` (the product of the two [`pc_plate_blocks`]
/// cross blocks). Closed form keeps `ln(1 - x)` finite as `s₀d → 0`.
fn perfect_conductor_mode(s0: f64, d: f64, powers: Option<usize>, quantity: Quantity) -> f64 {
    let x = (-2.0 * s0 * d).exp();
    match (quantity, powers) {
        (Quantity::Energy, None) => 2.0 * ln_one_minus_reflected(1.0, s0 * d),
        (Quantity::Energy, Some(p)) => -2.0 * (1..=p).map(|q| x.powi(q as i32) / q as f64).sum::<f64>(),
        (Quantity::Force, None) => -4.0 * s0 * x / one_minus_reflected(1.0, s0 * d),
        (Quantity::Force, Some(p)) => -4.0 * s0 * (1..=p).map(|q| x.powi(q as i32)).sum::<f64>(),
    }
}

/// `∫₀^∞ k dk/(2π) f(κ, k)` for one κ > 0; `(value, converged)`.
fn k_integral(cfg: &PlateConfig, kappa: Wavenumber, formulation: Formulation, quantity: Quantity) -> Result<(f64, bool)> {
    let mode = ModeIntegrand::new(cfg, kappa, formulation, quantity)?;
    let error = RefCell::new(None);
    let scale = kappa.value().max(1.0 / cfg.distance);
    let inner = QuadratureConfig { rel_tol: cfg.quadrature.rel_tol * 0.1, ..cfg.quadrature };
    let r = integrate_semi_infinite(
        |k| match mode.eval(k) {
            Ok(v) => k * v / (2.0 * PI),
            Err(e) => {
                error.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        scale,
        &inner,
    );
    match error.into_inner() {
        Some(e) => Err(e),
        None => Ok((r.value, r.converged)),
    }
}

fn static_term(cfg: &PlateConfig, formulation: Formulation, quantity: Quantity) -> Result<f64> {
    let r = [static_reflections(&cfg.medium0, &cfg.body1)?, static_reflections(&cfg.medium0, &cfg.body2)?];
    let powers = match formulation {
        Formulation::Fresnel => None,
        Formulation::Operator(order) => order.round_trips(),
    };
    match quantity {
        Quantity::Energy => static_plate_n0_term(r, cfg.distance, powers),
        Quantity::Force => static_plate_n0_force_term(r, cfg.distance, powers),
    }
}

fn evaluate(cfg: &PlateConfig, formulation: Formulation, quantity: Quantity) -> Result<PlateResult> {
    cfg.validated()?;
    match cfg.temperature {
        Temperature::Thermal(tau) => {
            let term0 = static_term(cfg, formulation, quantity)?;
            let failure = std::sync::Mutex::new(None);
            let inner_ok = std::sync::atomic::AtomicBool::new(true);
            let breakdown = matsubara_sum_par(
                |kappa| {
                    if kappa.is_zero() {
                        return term0;
                    }
                    match k_integral(cfg, kappa, formulation, quantity) {
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
            let converged = breakdown.converged && inner_ok.into_inner();
            Ok(PlateResult { value: breakdown.total, abs_error: breakdown.tail_estimate, converged, breakdown: Some(breakdown) })
        }
        Temperature::Zero => {
            let error = RefCell::new(None);
            let inner_ok = RefCell::new(true);
            let r = zero_temperature_integral(
                |kappa| {
                    let kappa = Wavenumber::new(kappa).expect("quadrature nodes are finite and positive");
                    match k_integral(cfg, kappa, formulation, quantity) {
                        Ok((v, ok)) => {
                            *inner_ok.borrow_mut() &= ok;
                            v
                        }
                        Err(e) => {
                            error.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    }
                },
                1.0 / cfg.distance,
                &cfg.quadrature,
            );
            if let Some(e) = error.into_inner() {
                return Err(e);
            }
            Ok(PlateResult { value: r.value, breakdown: None, abs_error: r.abs_error, converged: r.converged && inner_ok.into_inner() })
        }
    }
}

/// Lifshitz energy per area from Fresnel coefficients.
pub fn lifshitz_energy_per_area(config: &PlateConfig) -> Result<PlateResult> {
    evaluate(config, Formulation::Fresnel, Quantity::Energy)
}

/// `-∂E/∂d` from Fresnel coefficients.
pub fn lifshitz_force_per_area(config: &PlateConfig) -> Result<PlateResult> {
    evaluate(config, Formulation::Fresnel, Quantity::Force)
}

/// Energy per area from the surface operators at expansion order `order`.
pub fn mse_energy_per_area(config: &PlateConfig, order: MseOrder) -> Result<PlateResult> {
    evaluate(config, Formulation::Operator(order), Quantity::Energy)
}

/// `-∂E/∂d` from the surface operators, differentiated per mode in closed form.
pub fn casimir_force_per_area(config: &PlateConfig, order: MseOrder) -> Result<PlateResult> {
    evaluate(config, Formulation::Operator(order), Quantity::Force)
}

/// Operator-route integrand of one mode, for diagnostics and tests.
pub fn mse_mode_logdet(config: &PlateConfig, kappa: Wavenumber, k: f64, order: MseOrder) -> Result<f64> {
    ModeIntegrand::new(config, kappa, Formulation::Operator(order), Quantity::Energy)?.eval(k)
}

/// Fresnel-route integrand of one mode.
pub fn lifshitz_mode_logdet(config: &PlateConfig, kappa: Wavenumber, k: f64) -> Result<f64> {
    ModeIntegrand::new(config, kappa, Formulation::Fresnel, Quantity::Energy)?.eval(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mse::{block_eigenvalues, round_trip};

    fn kap(k: f64) -> Wavenumber {
        Wavenumber::new(k).unwrap()
    }

    #[test]
    fn reflected_logs_keep_both_ends() {
        let pc = FresnelPair::PERFECT_CONDUCTOR;
        // far end: e^{-60} is below the resolution of 1 - x
        let far = perfect_conductor_mode(30.0, 1.0, None, Quantity::Energy);
        assert_eq!(far, 2.0 * (-(-60.0f64).exp()).ln_1p());
        assert_eq!(lifshitz_mode(pc, pc, 30.0, 1.0), far);
        // near end: 1 - e^{-2e-10} = 2e-10 - 2e-20 + ...
        let near = lifshitz_mode(pc, pc, 1e-10, 1.0);
        let reference = 2.0 * (2e-10f64 - 2e-20).ln();
        assert!((near / reference - 1.0).abs() < 1e-15, "{near} vs {reference}");
        assert_eq!(perfect_conductor_mode(1e-10, 1.0, None, Quantity::Energy), near);
    }

    fn media(e1: f64, m1: f64, e2: f64, m2: f64) -> PlateMedia {
        PlateMedia {
            medium0: MediumResponse::VACUUM,
            body1: MediumResponse::new(e1, m1).unwrap(),
            body2: MediumResponse::new(e2, m2).unwrap(),
        }
    }

    fn lifshitz_direct(m: &PlateMedia, kappa: f64, k: f64, d: f64) -> f64 {
        let s0 = s_of(m.medium0, kappa, k * k);
        lifshitz_mode(FresnelPair::new(k, kap(kappa), m.medium0, m.body1), FresnelPair::new(k, kap(kappa), m.medium0, m.body2), s0, d)
    }

    #[test]
    fn zero_contrast_self_block_vanishes() {
        let m = media(1.0, 1.0, 1.0, 1.0);
        assert_eq!(plate_self_block(Body::One, 0.7, kap(1.3), &m).unwrap(), PolarizationBlock::zeros());
        assert!(plate_self_block(Body::One, 0.7, Wavenumber::ZERO, &m).is_err());
    }

    #[test]
    fn self_eigenvalue_example() {
        let m = media(2.0, 1.0, 2.0, 1.0);
        let (lp, lm) = plate_self_eigs(1.0, kap(1.0), m.medium0, m.body1).unwrap();
        assert!((lp - 0.153_981_582_639_482_6).abs() < 1e-12, "{lp}");
        assert_eq!(lm, -lp);
        for body in [Body::One, Body::Two] {
            let ev = block_eigenvalues(&plate_self_block(body, 1.0, kap(1.0), &m).unwrap());
            let mut re: Vec<f64> = ev.iter().map(|v| v.re).collect();
            re.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((re[0] + lp).abs() < 1e-10 && (re[1] + lp).abs() < 1e-10);
            assert!((re[2] - lp).abs() < 1e-10 && (re[3] - lp).abs() < 1e-10);
            assert!(ev.iter().all(|v| v.im.abs() < 1e-10));
        }
    }

    #[test]
    fn cross_block_regression() {
        let m = media(2.0, 1.0, 2.0, 1.0);
        let b = plate_cross_block(CrossDirection::K12, 1.0, kap(1.0), 1.0, &m).unwrap();
        let e = (-2f64.sqrt()).exp();
        assert!((b.ee() - Matrix2::identity() * (-0.5 * e)).amax() < 1e-15);
        assert!((b.hh() - Matrix2::identity() * (-e / 3.0)).amax() < 1e-15);
        // A(1) at k = (1, 0), κ = 1: [[0, -2], [1, 0]]
        let s0 = 2f64.sqrt();
        assert!((b.eh()[(0, 1)] - (-2.0 * e / (2.0 * s0))).abs() < 1e-15);
        assert!((b.eh()[(1, 0)] - (e / (2.0 * s0))).abs() < 1e-15);
        assert!((b.he()[(0, 1)] - (2.0 * e / (3.0 * s0))).abs() < 1e-15);
        let far = plate_cross_block(CrossDirection::K21, 1.0, kap(1.0), 60.0, &m).unwrap();
        assert!(far.max_abs() < 1e-36);
    }

    #[test]
    fn stated_and_generic_blocks_agree_for_c1() {
        // the generic form uses the rotated tangential basis (n̂ × x̂, n̂ × ŷ)
        // with m flipped, i.e. it is similar to the stated form through S
        let m = media(3.0, 2.0, 7.0, 1.5);
        let (kappa, d) = (kap(1.1), 0.9);
        let c1 = [
            CoefficientChoice::C1.resolve(0, m.medium0, m.body1).unwrap(),
            CoefficientChoice::C1.resolve(1, m.medium0, m.body2).unwrap(),
        ];
        let s = Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, -1.0, 0.0,
        );
        for kv in [[0.9, 0.0], [0.6, 0.8]] {
            let g = plate_blocks_with(kv, kappa, d, &m, c1).unwrap();
            for (gen, body) in [(g.k11.0, Body::One), (g.k22.0, Body::Two)] {
                let stated = plate_self_block_at(body, kv, kappa, &m).unwrap().0;
                let mapped = s * gen * s;
                assert!((mapped - stated).amax() < 1e-14, "{mapped} vs {stated}");
            }
        }
    }

    #[test]
    fn logdet_matches_lifshitz_for_all_coefficient_choices() {
        let m = media(3.0, 2.0, 7.0, 1.5);
        let custom = Coefficients { inner_e: 0.9, inner_h: 2.0, outer_e: 1.7, outer_h: 2.5 };
        for (kappa, k, d) in [(0.3, 1.2, 0.7), (1.1, 0.2, 1.9), (2.0, 2.0, 0.4)] {
            let exact = lifshitz_direct(&m, kappa, k, d);
            for choice in [
                [CoefficientChoice::C1.resolve(0, m.medium0, m.body1).unwrap(), CoefficientChoice::C1.resolve(1, m.medium0, m.body2).unwrap()],
                [CoefficientChoice::C2.resolve(0, m.medium0, m.body1).unwrap(); 2],
                [custom, custom],
            ] {
                let b = plate_blocks_with([k, 0.0], kap(kappa), d, &m, choice).unwrap();
                let r = round_trip(&b.k11, &b.k12, &b.k22, &b.k21, Inverse::Exact).unwrap();
                assert!(((r.logdet_one_minus - exact) / exact).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn rotation_invariance() {
        let m = media(5.0, 1.0, 2.0, 3.0);
        let (kappa, d, k) = (kap(0.8), 1.3, 0.9);
        let mut values = Vec::new();
        for angle in [0.0, 0.4, 1.3, 2.9] {
            let kv = [k * f64::cos(angle), k * f64::sin(angle)];
            let r = round_trip(
                &plate_self_block_at(Body::One, kv, kappa, &m).unwrap(),
                &plate_cross_block_at(CrossDirection::K12, kv, kappa, d, &m).unwrap(),
                &plate_self_block_at(Body::Two, kv, kappa, &m).unwrap(),
                &plate_cross_block_at(CrossDirection::K21, kv, kappa, d, &m).unwrap(),
                Inverse::Exact,
            )
            .unwrap();
            values.push(r.logdet_one_minus);
        }
        assert!(values.iter().all(|v| ((v - values[0]) / values[0]).abs() < 1e-13));
    }

    #[test]
    fn pc_blocks() {
        let b = pc_plate_blocks(0.5, kap(1.0), 1.0, MediumResponse::VACUUM).unwrap();
        assert_eq!(b.self_block, Matrix2::zeros());
        let s0 = 1.25f64.sqrt();
        assert!((b.k12 * b.k21 - Matrix2::identity() * (-2.0 * s0).exp()).amax() < 1e-16);
    }

    #[test]
    fn lifshitz_n0_routes_through_static() {
        let cfg = PlateConfig::new(MaterialModel::fixed(4.0, 1.0).unwrap(), MaterialModel::fixed(4.0, 1.0).unwrap(), 1.0, Temperature::Thermal(0.05));
        let r = lifshitz_energy_per_area(&cfg).unwrap();
        let b = r.breakdown.unwrap();
        let expected = -polylog_sq(0.6) / (8.0 * PI);
        assert!((b.terms[0].value - expected).abs() < 1e-15);
        assert!(r.converged && r.value < 0.0);
    }

    fn polylog_sq(r: f64) -> f64 {
        crate::special::polylog3(r * r)
    }

    #[test]
    fn mixed_pairs_rejected_on_operator_path() {
        let cfg = PlateConfig::new(MaterialModel::PerfectConductor, MaterialModel::fixed(4.0, 1.0).unwrap(), 1.0, Temperature::Zero);
        assert!(mse_energy_per_area(&cfg, MseOrder::Exact).is_err());
    }
}
