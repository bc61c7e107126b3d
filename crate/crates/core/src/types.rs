//! Shared value types: wavenumbers, material models, coefficient presets,
//! mode labels, expansion orders and result containers.

use std::fmt;

use nalgebra::{Complex, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::units::{thermal_wavenumber, LengthUnit};

/// Imaginary-frequency wavenumber `κ = ξ/c`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub const ZERO: Wavenumber = Wavenumber(0.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() && kappa >= 0.0 {
            Ok(Wavenumber(kappa))
        } else {
            Err(invalid("kappa", format!("must be finite and non-negative, got {kappa}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

/// Permittivity and permeability at one imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumResponse {
    pub epsilon: f64,
    pub mu: f64,
}

impl MediumResponse {
    pub const VACUUM: MediumResponse = MediumResponse { epsilon: 1.0, mu: 1.0 };

    pub fn new(epsilon: f64, mu: f64) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        require_positive("mu", mu)?;
        Ok(MediumResponse { epsilon, mu })
    }

    /// `√(εμ)`
    pub fn index(&self) -> f64 {
        (self.epsilon * self.mu).sqrt()
    }

    pub fn product(&self) -> f64 {
        self.epsilon * self.mu
    }
}

impl Default for MediumResponse {
    fn default() -> Self {
        Self::VACUUM
    }
}

/// Dispersion model along the imaginary frequency axis.
///
/// Frequencies (`omega_p`, `gamma`) are wavenumbers in the same inverse length
/// unit as `κ`; use [`MaterialModel::drude_ev`] to convert from eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum MaterialModel {
    Fixed { epsilon: f64, mu: f64 },
    Drude { omega_p: f64, gamma: f64, mu: f64 },
    Plasma { omega_p: f64, mu: f64 },
    PerfectConductor,
}

impl MaterialModel {
    pub const VACUUM: MaterialModel = MaterialModel::Fixed { epsilon: 1.0, mu: 1.0 };

    pub fn fixed(epsilon: f64, mu: f64) -> Result<Self> {
        MaterialModel::Fixed { epsilon, mu }.validated()
    }

    /// Drude metal from plasma frequency and damping given in eV.
    pub fn drude_ev(omega_p_ev: f64, gamma_ev: f64, unit: LengthUnit) -> Result<Self> {
        MaterialModel::Drude {
            omega_p: crate::units::ev_to_wavenumber(omega_p_ev, unit),
            gamma: crate::units::ev_to_wavenumber(gamma_ev, unit),
            mu: 1.0,
        }
        .validated()
    }

    /// Gold-like Drude parameters, ωp = 9 eV and γ = 35 meV.
    pub fn gold_like(unit: LengthUnit) -> Self {
        Self::drude_ev(9.0, 0.035, unit).expect("constant parameters are valid")
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            MaterialModel::Fixed { epsilon, mu } => {
                require_positive("epsilon", epsilon)?;
                require_positive("mu", mu)?;
            }
            MaterialModel::Drude { omega_p, gamma, mu } => {
                require_positive("omega_p", omega_p)?;
                require_positive("gamma", gamma)?;
                require_positive("mu", mu)?;
            }
            MaterialModel::Plasma { omega_p, mu } => {
                require_positive("omega_p", omega_p)?;
                require_positive("mu", mu)?;
            }
            MaterialModel::PerfectConductor => {}
        }
        Ok(self)
    }

    pub fn is_perfect_conductor(&self) -> bool {
        matches!(self, MaterialModel::PerfectConductor)
    }

    pub fn evaluate(&self, kappa: Wavenumber) -> Result<MediumResponse> {
        evaluate_material(self, kappa)
    }

    /// Static permeability; the permittivity of a conductor is infinite at κ = 0.
    pub fn static_mu(&self) -> Option<f64> {
        match *self {
            MaterialModel::Fixed { mu, .. }
            | MaterialModel::Drude { mu, .. }
            | MaterialModel::Plasma { mu, .. } => Some(mu),
            MaterialModel::PerfectConductor => None,
        }
    }

    /// Static permittivity, `None` when it diverges.
    pub fn static_epsilon(&self) -> Option<f64> {
        match *self {
            MaterialModel::Fixed { epsilon, .. } => Some(epsilon),
            _ => None,
        }
    }
}

/// ε(iξ), μ(iξ) of a material model.
pub fn evaluate_material(model: &MaterialModel, kappa: Wavenumber) -> Result<MediumResponse> {
    let k = kappa.value();
    match *model {
        MaterialModel::Fixed { epsilon, mu } => MediumResponse::new(epsilon, mu),
        MaterialModel::Drude { omega_p, gamma, mu } => {
            if k == 0.0 {
                return Err(Error::StaticLimit("Drude permittivity"));
            }
            MediumResponse::new(1.0 + omega_p * omega_p / (k * (k + gamma)), mu)
        }
        MaterialModel::Plasma { omega_p, mu } => {
            if k == 0.0 {
                return Err(Error::StaticLimit("plasma permittivity"));
            }
            MediumResponse::new(1.0 + omega_p * omega_p / (k * k), mu)
        }
        MaterialModel::PerfectConductor => Err(Error::PerfectConductor),
    }
}

/// Inner and outer weights of one body, `diag(c_E, c_H)` each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub inner_e: f64,
    pub inner_h: f64,
    pub outer_e: f64,
    pub outer_h: f64,
}

impl Coefficients {
    pub fn validated(self) -> Result<Self> {
        let all = [self.inner_e, self.inner_h, self.outer_e, self.outer_h];
        if all.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coefficients", "entries must be finite"));
        }
        if self.inner_e + self.outer_e == 0.0 || self.inner_h + self.outer_h == 0.0 {
            return Err(invalid("coefficients", "inner + outer must be invertible per field"));
        }
        Ok(self)
    }
}

/// Choice of the weights that combine interior and exterior field equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CoefficientChoice {
    /// Inner `(ε_σ, μ_σ)`, outer `(ε_0, μ_0)`: the weakly singular kernel.
    C1,
    /// Inner `diag(1, 0)`, outer `diag(0, 1)`.
    C2,
    /// Explicit weights for body 1 and body 2 (a single body uses the first).
    Custom([Coefficients; 2]),
}

impl CoefficientChoice {
    pub fn resolve(&self, body: usize, outside: MediumResponse, inside: MediumResponse) -> Result<Coefficients> {
        let c = match self {
            CoefficientChoice::C1 => Coefficients {
                inner_e: inside.epsilon,
                inner_h: inside.mu,
                outer_e: outside.epsilon,
                outer_h: outside.mu,
            },
            CoefficientChoice::C2 => Coefficients { inner_e: 1.0, inner_h: 0.0, outer_e: 0.0, outer_h: 1.0 },
            CoefficientChoice::Custom(per_body) => *per_body
                .get(body)
                .ok_or_else(|| invalid("body", format!("no coefficients for body {}", body + 1)))?,
        };
        c.validated()
    }
}

/// Neumann order of each `(1 - K_σσ)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inverse {
    Neumann(usize),
    Exact,
}

/// Expansion order `MSE_kl`: `2(k + 1)` inter-body scatterings and `l`
/// intra-body scatterings per inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MseOrder {
    Order { k: usize, l: usize },
    Exact,
}

impl MseOrder {
    pub fn new(k: usize, l: usize) -> Self {
        MseOrder::Order { k, l }
    }

    pub fn round_trips(&self) -> Option<usize> {
        match *self {
            MseOrder::Order { k, .. } => Some(k + 1),
            MseOrder::Exact => None,
        }
    }

    pub fn inverse(&self) -> Inverse {
        match *self {
            MseOrder::Order { l, .. } => Inverse::Neumann(l),
            MseOrder::Exact => Inverse::Exact,
        }
    }
}

impl fmt::Display for MseOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MseOrder::Order { k, l } => write!(f, "MSE_{k}{l}"),
            MseOrder::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeIndex {
    PlaneWave { k: f64 },
    Spherical { l: usize },
    Cylindrical { m: usize, kz: f64 },
}

impl ModeIndex {
    pub fn validated(self) -> Result<Self> {
        match self {
            ModeIndex::PlaneWave { k } if !(k.is_finite() && k >= 0.0) => {
                Err(invalid("k", format!("must be finite and non-negative, got {k}")))
            }
            ModeIndex::Spherical { l: 0 } => Err(invalid("l", "transverse modes start at l = 1")),
            ModeIndex::Cylindrical { kz, .. } if !kz.is_finite() => Err(invalid("kz", "must be finite")),
            ok => Ok(ok),
        }
    }
}

/// Temperature as a thermal wavenumber `k_B T/(ħc)` in inverse library units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Temperature {
    Zero,
    Thermal(f64),
}

impl Temperature {
    pub fn kelvin(kelvin: f64, unit: LengthUnit) -> Result<Self> {
        if !(kelvin.is_finite() && kelvin >= 0.0) {
            return Err(invalid("temperature", format!("must be >= 0 K, got {kelvin}")));
        }
        Ok(if kelvin == 0.0 { Temperature::Zero } else { Temperature::Thermal(thermal_wavenumber(kelvin, unit)) })
    }

    pub fn thermal_wavenumber(&self) -> f64 {
        match *self {
            Temperature::Zero => 0.0,
            Temperature::Thermal(tau) => tau,
        }
    }
}

/// Matsubara wavenumbers `κ_n = 2πnτ`, `n = 0..=n_max`.
pub fn matsubara_grid(temperature: Temperature, n_max: usize) -> Result<Vec<Wavenumber>> {
    let tau = match temperature {
        Temperature::Thermal(tau) if tau > 0.0 && tau.is_finite() => tau,
        _ => return Err(invalid("temperature", "Matsubara grid needs T > 0")),
    };
    let step = 2.0 * std::f64::consts::PI * tau;
    (0..=n_max).map(|n| Wavenumber::new(step * n as f64)).collect()
}

/// 4×4 operator block of one scattering mode.
///
/// Rows and columns are ordered `(E1, E2, H1, H2)`: the electric surface
/// current `j` along the two tangential unit vectors of the backend, then the
/// magnetic surface current `m` along the same vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBlock(pub Matrix4<f64>);

impl PolarizationBlock {
    pub fn zeros() -> Self {
        PolarizationBlock(Matrix4::zeros())
    }

    pub fn identity() -> Self {
        PolarizationBlock(Matrix4::identity())
    }

    /// Assemble from the `j ← j`, `j ← m`, `m ← j` and `m ← m` sub-blocks.
    pub fn from_blocks(ee: Matrix2<f64>, eh: Matrix2<f64>, he: Matrix2<f64>, hh: Matrix2<f64>) -> Self {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&ee);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&eh);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&he);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&hh);
        PolarizationBlock(m)
    }

    pub fn ee(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn eh(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 2).into_owned()
    }

    pub fn he(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(2, 0).into_owned()
    }

    pub fn hh(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn eigenvalues(&self) -> [Complex<f64>; 4] {
        crate::mse::block_eigenvalues(self)
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[(i, j)];
            }
        }
        out
    }
}

impl From<Matrix4<f64>> for PolarizationBlock {
    fn from(m: Matrix4<f64>) -> Self {
        PolarizationBlock(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatsubaraTerm {
    pub n: usize,
    pub kappa: f64,
    pub value: f64,
}

/// Matsubara terms and their primed sum.
///
/// `total = τ [½ term₀ + Σ_{n≥1} termₙ]`; `terms` hold the unweighted values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub terms: Vec<MatsubaraTerm>,
    pub total: f64,
    pub tail_estimate: f64,
    pub converged: bool,
}

impl EnergyBreakdown {
    /// Weight of each term in `total`.
    pub fn weight(tau: f64, n: usize) -> f64 {
        if n == 0 {
            0.5 * tau
        } else {
            tau
        }
    }
}
