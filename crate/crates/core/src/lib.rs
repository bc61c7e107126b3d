//! Casimir and Casimir-Polder interactions of magneto-dielectric bodies from
//! surface scattering operators.
//!
//! The operator `K` of a body maps tangential surface currents `(j, m)` onto
//! themselves after one propagation-plus-scattering step. Its Neumann series
//! is the multiple scattering expansion; log-determinants of round-trip
//! operators give interaction energies. Three spectral backends evaluate `K`
//! exactly per partial wave: parallel plates, a sphere and a cylinder.
//!
//! Lengths are in an arbitrary unit `L`; wavenumbers in `1/L`; energies per
//! area in `ħc/L³`. See [`units`] for conversions to SI.

pub mod cp;
pub mod cylinder;
pub mod error;
pub mod greens;
pub mod mse;
pub mod plates;
pub mod quad;
pub mod special;
pub mod sphere;
pub mod statics;
pub mod types;
pub mod units;

pub use error::{Error, Result};
pub use types::{
    CoefficientChoice, Coefficients, EnergyBreakdown, MaterialModel, MatsubaraTerm, MediumResponse,
    ModeIndex, MseOrder, PolarizationBlock, Temperature, Wavenumber,
};
