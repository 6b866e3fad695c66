//! Casimir energies, forces and free energies for canonical geometries.
//!
//! Units are natural throughout (`ħ = c = k_B = 1`): lengths are arbitrary
//! but consistent, energies come out in units of `ħc / length`, and a
//! temperature `T` means `k_B T / ħc` in inverse length.

pub mod edges;
pub mod error;
pub mod lifshitz;
pub mod materials;
pub mod numerics;
pub mod pfa_gradient;
pub mod scattering;
pub mod thermal;

pub use error::{CasimirError, Result};
