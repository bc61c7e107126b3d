//! Physical constants and unit conversions.
//!
//! Internally ħ = c = k_B = 1. A temperature enters as the thermal wavenumber
//! `k_B T / (ħ c)` in inverse library length units.

use serde::{Deserialize, Serialize};

/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;
/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;
/// Elementary charge in J/eV.
pub const JOULE_PER_EV: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    Nanometre,
    Micrometre,
    Metre,
}

impl LengthUnit {
    pub fn in_nanometres(self) -> f64 {
        match self {
            LengthUnit::Nanometre => 1.0,
            LengthUnit::Micrometre => 1e3,
            LengthUnit::Metre => 1e9,
        }
    }

    pub fn in_metres(self) -> f64 {
        self.in_nanometres() * 1e-9
    }

    pub fn symbol(self) -> &'static str {
        match self {
            LengthUnit::Nanometre => "nm",
            LengthUnit::Micrometre => "um",
            LengthUnit::Metre => "m",
        }
    }
}

/// `k_B T / (ħ c)` in `1/unit`.
pub fn thermal_wavenumber(kelvin: f64, unit: LengthUnit) -> f64 {
    BOLTZMANN_EV_PER_K * kelvin / HBAR_C_EV_NM * unit.in_nanometres()
}

/// Photon energy in eV expressed as a wavenumber in `1/unit`.
pub fn ev_to_wavenumber(ev: f64, unit: LengthUnit) -> f64 {
    ev / HBAR_C_EV_NM * unit.in_nanometres()
}

/// `ħc / unit³` in J/m².
pub fn energy_per_area_si(unit: LengthUnit) -> f64 {
    HBAR_C_EV_NM * JOULE_PER_EV * 1e-9 / unit.in_metres().powi(3)
}

/// `ħc / unit⁴` in N/m² (Pa).
pub fn pressure_si(unit: LengthUnit) -> f64 {
    energy_per_area_si(unit) / unit.in_metres()
}

/// `ħc / unit` in J.
pub fn energy_si(unit: LengthUnit) -> f64 {
    HBAR_C_EV_NM * JOULE_PER_EV * 1e-9 / unit.in_metres()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_matsubara_wavenumber_at_room_temperature() {
        let tau = thermal_wavenumber(300.0, LengthUnit::Micrometre);
        let kappa1 = 2.0 * std::f64::consts::PI * tau;
        assert!((kappa1 - 0.823_166_223_3).abs() < 1e-9, "{kappa1}");
    }

    #[test]
    fn energy_unit_in_si() {
        assert!((energy_per_area_si(LengthUnit::Nanometre) - 31.615_27).abs() < 1e-4);
    }
}
