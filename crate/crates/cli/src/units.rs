//! Conversions at the boundary between SI input/output and the natural units
//! of the library. In SI mode lengths are metres, temperatures kelvin and
//! material frequencies electron-volts; the library then sees lengths in
//! metres and `k_B T/ħc`, `ω/c` in inverse metres.

use casimir_core::materials::{DielectricModel, EV_TO_RAD_PER_S};

use crate::config::{MaterialSpec, Units};

/// `ħc` in J·m.
pub const HBAR_C: f64 = 3.161_526_773_4e-26;
/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in m/s.
pub const C: f64 = 299_792_458.0;

impl Units {
    pub fn temperature_in(self, t: f64) -> f64 {
        match self {
            Units::Natural => t,
            Units::Si => t * K_B / HBAR_C,
        }
    }

    pub fn frequency_in(self, w: f64) -> f64 {
        match self {
            Units::Natural => w,
            Units::Si => w * EV_TO_RAD_PER_S / C,
        }
    }

    /// Energies, energies per length and per area alike: the length powers
    /// already match when lengths are metres.
    pub fn energy_out(self, e: f64) -> f64 {
        match self {
            Units::Natural => e,
            Units::Si => e * HBAR_C,
        }
    }

    pub fn entropy_out(self, s: f64) -> f64 {
        match self {
            Units::Natural => s,
            Units::Si => s * K_B,
        }
    }

    pub fn material(self, m: MaterialSpec) -> DielectricModel {
        match m {
            MaterialSpec::Pec => DielectricModel::PerfectConductor,
            MaterialSpec::Vacuum => DielectricModel::Vacuum,
            MaterialSpec::Plasma { omega_p } => DielectricModel::Plasma {
                omega_p: self.frequency_in(omega_p),
            },
            MaterialSpec::Drude { omega_p, gamma } => DielectricModel::Drude {
                omega_p: self.frequency_in(omega_p),
                gamma: self.frequency_in(gamma),
            },
            MaterialSpec::Constant { eps } => DielectricModel::Constant { eps },
        }
    }

    /// Human-readable unit of each reported quantity.
    pub fn describe(self) -> Vec<(&'static str, &'static str)> {
        match self {
            Units::Natural => vec![
                ("length", "any consistent length L"),
                ("temperature", "k_B T/ħc in 1/L"),
                ("frequency", "ω/c in 1/L"),
                ("energy", "ħc/L"),
                ("energy_per_length", "ħc/L²"),
                ("energy_per_area", "ħc/L³"),
                ("entropy_per_area", "k_B/L²"),
            ],
            Units::Si => vec![
                ("length", "m"),
                ("temperature", "K"),
                ("frequency", "eV"),
                ("energy", "J"),
                ("energy_per_length", "J/m"),
                ("energy_per_area", "J/m²"),
                ("entropy_per_area", "J/(K·m²)"),
            ],
        }
    }
}
