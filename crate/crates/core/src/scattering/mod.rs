//! Scattering (TGTG) energies for scalar spheres and planes, and the
//! retarded interaction of two polarisable dipoles.
//!
//! ```text
//! E = (1/2π) ∫₀^∞ dκ Σ_m ln det(1 − N^m(κ))
//! ```
//!
//! Sphere T-matrices are diagonal ratios of modified spherical Bessel
//! functions; translation blocks come from the scalar addition theorem.

mod dipole;
mod energy;
mod translation;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, CasimirError, Result};
use crate::numerics::BesselSequence;

pub use dipole::{
    casimir_polder_energy, casimir_polder_integrand, casimir_polder_quadrature, CasimirPolderQuadrature, DipolePair,
};
pub use energy::{
    default_l_max_sphere_plate, default_l_max_spheres, round_trip_block_sphere_plate, round_trip_block_spheres,
    tgtg_energy_mixed, tgtg_energy_scalar, tgtg_energy_sphere_plate, EnergyResult, RoundTripBlock,
    MIN_GAP_RATIO_DEFAULT,
};
pub use translation::{translation_block, GauntTable, TranslationBlock, MAX_L};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarBc {
    Dirichlet,
    Neumann,
}

impl ScalarBc {
    /// Reflection coefficient of a flat boundary in the image construction.
    pub fn plane_reflection(self) -> f64 {
        match self {
            Self::Dirichlet => -1.0,
            Self::Neumann => 1.0,
        }
    }

    pub fn t_sign(self) -> f64 {
        match self {
            Self::Dirichlet => 1.0,
            Self::Neumann => -1.0,
        }
    }
}

impl FromStr for ScalarBc {
    type Err = CasimirError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" | "dirichlet" => Ok(Self::Dirichlet),
            "n" | "neumann" => Ok(Self::Neumann),
            _ => Err(invalid("bc", format!("expected dirichlet or neumann, got {s:?}"))),
        }
    }
}

/// Diagonal sphere T-matrix at one imaginary wavenumber, kept as signs and
/// logarithms so that large orders and arguments stay representable.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSphereT {
    pub radius: f64,
    pub bc: ScalarBc,
    pub kappa: f64,
    /// `ln |T_l|` for `l = 0..=l_max`.
    pub ln_abs: Vec<f64>,
}

impl ScalarSphereT {
    pub fn new(radius: f64, bc: ScalarBc, kappa: f64, l_max: usize) -> Result<Self> {
        check_t_args(kappa, radius)?;
        let seq = BesselSequence::new(l_max, kappa * radius)?;
        Ok(Self::from_sequence(radius, bc, kappa, &seq))
    }

    pub(crate) fn from_sequence(radius: f64, bc: ScalarBc, kappa: f64, seq: &BesselSequence) -> Self {
        let ln_abs = (0..seq.ln_i.len())
            .map(|l| {
                let base = seq.ln_i[l] - seq.ln_k[l];
                match bc {
                    ScalarBc::Dirichlet => base,
                    ScalarBc::Neumann => base + seq.di[l].ln() - (-seq.dk[l]).ln(),
                }
            })
            .collect();
        Self {
            radius,
            bc,
            kappa,
            ln_abs,
        }
    }

    pub fn sign(&self) -> f64 {
        self.bc.t_sign()
    }

    pub fn l_max(&self) -> usize {
        self.ln_abs.len() - 1
    }

    /// `T_l`, or an overflow error if it leaves the double range.
    pub fn entry(&self, l: usize) -> Result<f64> {
        let v = self.ln_abs[l];
        if v > 709.0 {
            return Err(CasimirError::Overflow {
                func: "scalar_sphere_t",
                detail: format!("ln|T_{l}| = {v}"),
            });
        }
        Ok(self.sign() * v.exp())
    }
}

fn check_t_args(kappa: f64, radius: f64) -> Result<()> {
    if !(kappa > 0.0 && radius > 0.0) || !(kappa.is_finite() && radius.is_finite()) {
        return Err(domain("scalar_sphere_t", format!("need κ > 0 and R > 0, got ({kappa}, {radius})")));
    }
    Ok(())
}

/// `T_l = i_l(κR)/k_l(κR)` (Dirichlet) or `i_l'(κR)/k_l'(κR)` (Neumann).
pub fn scalar_sphere_t(l: usize, kappa: f64, radius: f64, bc: ScalarBc) -> Result<f64> {
    ScalarSphereT::new(radius, bc, kappa, l)?.entry(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_monopole() {
        let t = scalar_sphere_t(0, 1.0, 1.0, ScalarBc::Dirichlet).unwrap();
        assert!((t - 2.0 / PI * 1f64.sinh() * 1f64.exp()).abs() < 1e-14);
        assert!((t - 2.033_70).abs() < 1e-6);
        let x = 1e-4;
        let small = scalar_sphere_t(0, x, 1.0, ScalarBc::Dirichlet).unwrap();
        assert!((small / (2.0 / PI * x) - 1.0).abs() < 2e-4);
    }

    #[test]
    fn neumann_monopole_is_cubic() {
        // i₀' ≈ x/3, k₀' ≈ −(π/2)/x², so T₀ ≈ −(2/3π) x³.
        for x in [1e-3, 1e-2] {
            let t = scalar_sphere_t(0, x, 1.0, ScalarBc::Neumann).unwrap();
            let lead = -2.0 / (3.0 * PI) * x * x * x;
            assert!((t / lead - 1.0).abs() < 2.0 * x * x, "{x}: {t} vs {lead}");
        }
    }

    #[test]
    fn large_argument_uses_logs() {
        let t = ScalarSphereT::new(1.0, ScalarBc::Dirichlet, 800.0, 4).unwrap();
        assert!(t.ln_abs.iter().all(|v| v.is_finite()));
        assert!(t.entry(0).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(scalar_sphere_t(0, 0.0, 1.0, ScalarBc::Dirichlet).is_err());
        assert!(scalar_sphere_t(0, 1.0, -1.0, ScalarBc::Neumann).is_err());
    }

    #[test]
    fn parse_bc() {
        assert_eq!("Dirichlet".parse::<ScalarBc>().unwrap(), ScalarBc::Dirichlet);
        assert_eq!("n".parse::<ScalarBc>().unwrap(), ScalarBc::Neumann);
        assert!("robin".parse::<ScalarBc>().is_err());
    }
}
