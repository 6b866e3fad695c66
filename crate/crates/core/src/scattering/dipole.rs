use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::{integrate_semiinfinite_with, QuadratureOptions, QuadratureResult};

/// Two isotropic point polarisabilities at distance `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipolePair {
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub d: f64,
}

impl DipolePair {
    pub fn new(alpha_1: f64, alpha_2: f64, d: f64) -> Result<Self> {
        let p = Self { alpha_1, alpha_2, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(invalid("d", format!("must be positive, got {}", self.d)));
        }
        for (name, a) in [("alpha_1", self.alpha_1), ("alpha_2", self.alpha_2)] {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(invalid(name, format!("must be non-negative, got {a}")));
            }
        }
        Ok(())
    }

    /// True when either polarisability exceeds `0.01 d³`, where the dipole
    /// approximation is no longer reliable.
    pub fn outside_validity(&self) -> bool {
        let lim = 0.01 * self.d.powi(3);
        self.alpha_1 > lim || self.alpha_2 > lim
    }
}

/// `E = −(23/4π) α₁α₂/d⁷`.
pub fn casimir_polder_energy(pair: &DipolePair) -> Result<f64> {
    pair.validate()?;
    Ok(-23.0 / (4.0 * PI) * pair.alpha_1 * pair.alpha_2 / pair.d.powi(7))
}

/// `(3 + 6u + 5u² + 2u³ + u⁴) e^{−2u}`.
pub fn casimir_polder_integrand(u: f64) -> f64 {
    if u > 400.0 {
        return 0.0;
    }
    (3.0 + u * (6.0 + u * (5.0 + u * (2.0 + u)))) * (-2.0 * u).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasimirPolderQuadrature {
    pub energy: f64,
    /// `∫₀^∞` of [`casimir_polder_integrand`]; exactly `23/4`.
    pub integral: QuadratureResult,
}

/// `E = −(1/πd)(α₁/d³)(α₂/d³) ∫₀^∞ (3 + 6u + 5u² + 2u³ + u⁴) e^{−2u} du`.
pub fn casimir_polder_quadrature(pair: &DipolePair) -> Result<CasimirPolderQuadrature> {
    pair.validate()?;
    let opts = QuadratureOptions::with_tol(1e-13).scale(0.5);
    let integral = integrate_semiinfinite_with(|u| Ok(casimir_polder_integrand(u)), 0.0, &opts)?;
    let d3 = pair.d.powi(3);
    let energy = -(pair.alpha_1 / d3) * (pair.alpha_2 / d3) * integral.value / (PI * pair.d);
    Ok(CasimirPolderQuadrature { energy, integral })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let e = casimir_polder_energy(&DipolePair::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((e + 1.830_281_845_6).abs() < 1e-9);
        let far = casimir_polder_energy(&DipolePair::new(1.0, 1.0, 2.0).unwrap()).unwrap();
        assert!((far * 128.0 / e - 1.0).abs() < 1e-15);
        assert_eq!(casimir_polder_energy(&DipolePair::new(0.0, 1.0, 1.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        assert_eq!(casimir_polder_integrand(0.0), 3.0);
        for (a1, a2, d) in [(1.0, 1.0, 1.0), (0.3, 2.0, 5.0), (1e-3, 4e-3, 0.7)] {
            let p = DipolePair::new(a1, a2, d).unwrap();
            let q = casimir_polder_quadrature(&p).unwrap();
            assert!((q.integral.value - 5.75).abs() < 1e-12);
            assert!((q.energy / casimir_polder_energy(&p).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn validity() {
        assert!(DipolePair::new(-1.0, 1.0, 1.0).is_err());
        assert!(DipolePair::new(1.0, 1.0, 0.0).is_err());
        assert!(DipolePair::new(1.0, 1.0, 1.0).unwrap().outside_validity());
        assert!(!DipolePair::new(1e-3, 1e-3, 1.0).unwrap().outside_validity());
    }
}
