//! Command-line arguments and their conversion to library inputs.

use std::path::PathBuf;

use casimir_sso::quad::QuadratureConfig;
use casimir_sso::units::LengthUnit;
use casimir_sso::{MaterialModel, MseOrder, Temperature};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Library length unit used in SI mode.
pub const SI_UNIT: LengthUnit = LengthUnit::Nanometre;

#[derive(Debug, Parser)]
#[command(name = "casimir-sso", version, about = "Casimir and Casimir-Polder interactions from surface scattering operators")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy or pressure between two parallel plates.
    Plates(PlatesArgs),
    /// Plate energy or pressure over a list of separations.
    PlatesSweep(PlatesSweepArgs),
    /// Eigenvalues of the sphere operator per multipole l.
    SphereEigs(SphereEigsArgs),
    /// Eigenvalues of the cylinder operator per mode (m, kz).
    CylinderEigs(CylinderEigsArgs),
    /// Cylinder T-matrix, closed form or from the scattering expansion.
    CylinderTmatrix(CylinderTmatrixArgs),
    /// Casimir-Polder energy of a particle above a plate.
    CpPlate(CpPlateArgs),
    /// Eigenvalues of the static surface-charge operator of a sphere.
    StaticEigs(StaticEigsArgs),
    /// Runs the built-in invariant suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// Lengths with nm/um/m suffixes, temperatures in K, results in SI.
    Si,
    /// Lengths and wavenumbers in an arbitrary unit L, results in ħc powers of L.
    Dimensionless,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "si")]
    pub units: Units,
    /// TOML file of `flag = value` pairs; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Fixed,
    Drude,
    Plasma,
    /// Drude metal with ωp = 9 eV, γ = 35 meV (SI mode only).
    Gold,
    Pc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Energy,
    Force,
}

/// Material flags; `wp` and `gamma` are in eV (SI) or 1/L (dimensionless).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Body {
    pub kind: BodyKind,
    pub eps: Option<f64>,
    pub mu: f64,
    pub wp: Option<f64>,
    pub gamma: Option<f64>,
}

impl Body {
    pub fn model(&self, units: Units, name: &str) -> Result<MaterialModel, String> {
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| format!("{name}: --{flag} is required for this material"));
        let model = match self.kind {
            BodyKind::Fixed => MaterialModel::Fixed { epsilon: need(self.eps, "eps")?, mu: self.mu },
            BodyKind::Pc => MaterialModel::PerfectConductor,
            BodyKind::Gold => match units {
                Units::Si => MaterialModel::gold_like(SI_UNIT),
                Units::Dimensionless => return Err(format!("{name}: gold needs --units si")),
            },
            BodyKind::Drude => {
                let (wp, gamma) = (need(self.wp, "wp")?, need(self.gamma, "gamma")?);
                match units {
                    Units::Si => match MaterialModel::drude_ev(wp, gamma, SI_UNIT).map_err(|e| e.to_string())? {
                        MaterialModel::Drude { omega_p, gamma, .. } => MaterialModel::Drude { omega_p, gamma, mu: self.mu },
                        other => other,
                    },
                    Units::Dimensionless => MaterialModel::Drude { omega_p: wp, gamma, mu: self.mu },
                }
            }
            BodyKind::Plasma => {
                let wp = need(self.wp, "wp")?;
                let omega_p = match units {
                    Units::Si => casimir_sso::units::ev_to_wavenumber(wp, SI_UNIT),
                    Units::Dimensionless => wp,
                };
                MaterialModel::Plasma { omega_p, mu: self.mu }
            }
        };
        model.validated().map_err(|e| format!("{name}: {e}"))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TwoBodies {
    #[arg(long, value_enum, default_value = "fixed")]
    pub body1: BodyKind,
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mu1: f64,
    #[arg(long)]
    pub wp1: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long, value_enum, default_value = "fixed")]
    pub body2: BodyKind,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mu2: f64,
    #[arg(long)]
    pub wp2: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Permittivity of the gap.
    #[arg(long, default_value_t = 1.0)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu0: f64,
}

impl TwoBodies {
    pub fn bodies(&self) -> [Body; 2] {
        [
            Body { kind: self.body1, eps: self.eps1, mu: self.mu1, wp: self.wp1, gamma: self.gamma1 },
            Body { kind: self.body2, eps: self.eps2, mu: self.mu2, wp: self.wp2, gamma: self.gamma2 },
        ]
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Thermal {
    /// Temperature in K (SI mode).
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Thermal wavenumber k_B T L/(ħc) (dimensionless mode).
    #[arg(long)]
    pub tau: Option<f64>,
}

impl Thermal {
    pub fn resolve(&self, units: Units) -> Result<Temperature, String> {
        match units {
            Units::Si => {
                if self.tau.is_some() {
                    return Err("--tau needs --units dimensionless; use --temperature".into());
                }
                Temperature::kelvin(self.temperature.unwrap_or(0.0), SI_UNIT).map_err(|e| e.to_string())
            }
            Units::Dimensionless => {
                if self.temperature.is_some() {
                    return Err("--temperature needs --units si; use --tau".into());
                }
                match self.tau.unwrap_or(0.0) {
                    0.0 => Ok(Temperature::Zero),
                    t if t.is_finite() && t > 0.0 => Ok(Temperature::Thermal(t)),
                    t => Err(format!("--tau must be >= 0, got {t}")),
                }
            }
        }
    }
}

/// Expansion order: `exact`, `lifshitz` (Fresnel route) or `K,L` for MSE_KL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Order {
    Lifshitz,
    Mse(MseOrder),
}

pub fn parse_order(s: &str) -> Result<Order, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "exact" => Ok(Order::Mse(MseOrder::Exact)),
        "lifshitz" => Ok(Order::Lifshitz),
        other => {
            let body = other.strip_prefix("mse_").unwrap_or(other);
            let (k, l) = body.split_once(',').ok_or_else(|| format!("order must be exact, lifshitz or K,L; got {s}"))?;
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad order index {x:?}"));
            Ok(Order::Mse(MseOrder::new(parse(k)?, parse(l)?)))
        }
    }
}

impl Order {
    pub fn label(&self) -> String {
        match self {
            Order::Lifshitz => "lifshitz".into(),
            Order::Mse(o) => o.to_string(),
        }
    }
}

/// A length in library units: SI inputs need an `nm`, `um` or `m` suffix and
/// are converted to nanometres; dimensionless inputs are plain numbers.
pub fn parse_length(s: &str, units: Units) -> Result<f64, String> {
    let s = s.trim();
    let (number, scale) = match units {
        Units::Dimensionless => (s, 1.0),
        Units::Si => {
            if let Some(n) = s.strip_suffix("nm") {
                (n, 1.0)
            } else if let Some(n) = s.strip_suffix("um") {
                (n, 1e3)
            } else if let Some(n) = s.strip_suffix('m') {
                (n, 1e9)
            } else {
                return Err(format!("length {s:?} needs a unit suffix (nm, um or m)"));
            }
        }
    };
    let v: f64 = number.trim().parse().map_err(|_| format!("cannot parse length {s:?}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("length {s:?} must be positive"));
    }
    Ok(v * scale)
}

/// Comma-separated list.
pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let out: Vec<T> = s.split(',').filter(|x| !x.trim().is_empty()).map(|x| item(x.trim())).collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("cannot parse number {s:?}"))
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("cannot parse non-negative integer {s:?}"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Tolerance {
    /// Relative tolerance of the quadratures and Matsubara sums.
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// Interval budget of each adaptive quadrature.
    #[arg(long, default_value_t = 2000)]
    pub max_subdivisions: usize,
}

impl Tolerance {
    /// Tolerances below a few ulps cannot be met and only burn the budget.
    pub const MIN_REL_TOL: f64 = 1e-15;

    pub fn quadrature(&self) -> Result<QuadratureConfig, String> {
        if !(self.rel_tol >= Self::MIN_REL_TOL && self.rel_tol < 1.0) {
            return Err(format!("--rel-tol must lie in [{:e}, 1), got {}", Self::MIN_REL_TOL, self.rel_tol));
        }
        let q = QuadratureConfig { rel_tol: self.rel_tol, max_subdivisions: self.max_subdivisions, ..Default::default() };
        q.validated().map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlatesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub bodies: TwoBodies,
    /// Plate separation, e.g. 100nm (SI) or 1 (dimensionless; default 1).
    #[arg(long)]
    pub distance: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub thermal: Thermal,
    #[arg(long, default_value = "exact")]
    pub order: String,
    #[arg(long, value_enum, default_value = "energy")]
    pub quantity: Quantity,
    /// Apply the Neumann truncation to both plates instead of plate 1 only.
    #[arg(long)]
    pub symmetric: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlatesSweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub bodies: TwoBodies,
    /// Comma-separated separations, e.g. 100nm,200nm,1um.
    #[arg(long)]
    pub distances: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub thermal: Thermal,
    #[arg(long, default_value = "exact")]
    pub order: String,
    #[arg(long, value_enum, default_value = "energy")]
    pub quantity: Quantity,
    #[arg(long)]
    pub symmetric: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockMethod {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SphereEigsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated multipoles, each >= 1.
    #[arg(long, default_value = "1")]
    pub l: String,
    /// Comma-separated κR values.
    #[arg(long = "kappaR")]
    pub kappa_r: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu0: f64,
    #[arg(long, value_enum, default_value = "analytic")]
    pub method: BlockMethod,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CylinderEigsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated azimuthal orders.
    #[arg(long, default_value = "0")]
    pub m: String,
    #[arg(long = "kappaR")]
    pub kappa_r: String,
    /// Comma-separated k_z R values.
    #[arg(long = "kzR", default_value = "0")]
    pub kz_r: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu0: f64,
    #[arg(long, value_enum, default_value = "analytic")]
    pub method: BlockMethod,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CylinderTmatrixArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long = "kappaR")]
    pub kappa_r: f64,
    #[arg(long = "kzR", default_value_t = 0.0)]
    pub kz_r: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu0: f64,
    /// Neumann order of the expansion; omitted gives the closed form.
    #[arg(long)]
    pub neumann: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CpPlateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Particle height above the plate.
    #[arg(long)]
    pub z0: String,
    /// Static electric polarizability (nm³ in SI mode, L³ otherwise).
    #[arg(long, default_value_t = 1.0)]
    pub alpha0: f64,
    /// Electric resonance (eV in SI mode, 1/L otherwise); omitted means constant α.
    #[arg(long)]
    pub omega_a: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub beta0: f64,
    #[arg(long)]
    pub omega_b: Option<f64>,
    #[arg(long, value_enum, default_value = "fixed")]
    pub body: BodyKind,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long)]
    pub wp: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub thermal: Thermal,
    #[arg(long, default_value = "exact")]
    pub order: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StaticEigsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 6)]
    pub l_max: usize,
    /// Static permittivity (or permeability) outside the sphere.
    #[arg(long, default_value_t = 1.0)]
    pub chi_out: f64,
    #[arg(long)]
    pub chi_in: f64,
    /// Gauss-Legendre latitudes of the surface grid.
    #[arg(long, default_value_t = 24)]
    pub n_theta: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelfcheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}
