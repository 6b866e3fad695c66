//! Dielectric response on the imaginary frequency axis and Fresnel
//! coefficients of a single planar interface with vacuum.
//!
//! Frequencies are in inverse length (`ξ/c`); permeability is fixed to one.
//! Ideal mirrors use the sign convention `r_te = −1`, `r_tm = +1`. Only
//! products `r₁ r₂` of like polarisations enter any energy here.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

/// Angular frequency in rad/s corresponding to a photon energy of 1 eV.
pub const EV_TO_RAD_PER_S: f64 = 1.519e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DielectricModel {
    PerfectConductor,
    Plasma { omega_p: f64 },
    /// `γ` is a fixed input; there is no temperature law for it.
    Drude { omega_p: f64, gamma: f64 },
    Constant { eps: f64 },
    Vacuum,
}

impl DielectricModel {
    pub fn plasma(omega_p: f64) -> Result<Self> {
        let m = Self::Plasma { omega_p };
        m.validate()?;
        Ok(m)
    }

    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self> {
        let m = Self::Drude { omega_p, gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn constant(eps: f64) -> Result<Self> {
        let m = Self::Constant { eps };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Plasma { omega_p } | Self::Drude { omega_p, .. } if !(omega_p > 0.0 && omega_p.is_finite()) => {
                Err(invalid("omega_p", format!("must be positive and finite, got {omega_p}")))
            }
            Self::Drude { gamma, .. } if !(gamma >= 0.0 && gamma.is_finite()) => {
                Err(invalid("gamma", format!("must be non-negative and finite, got {gamma}")))
            }
            Self::Constant { eps } if !(eps >= 1.0 && eps.is_finite()) => {
                Err(invalid("eps", format!("must be finite and at least 1, got {eps}")))
            }
            _ => Ok(()),
        }
    }

    /// Short identifier used in tables and config files.
    pub fn name(&self) -> &'static str {
        match self {
            Self::PerfectConductor => "pec",
            Self::Plasma { .. } => "plasma",
            Self::Drude { .. } => "drude",
            Self::Constant { .. } => "constant",
            Self::Vacuum => "vacuum",
        }
    }

    /// `ε(iξ) − 1`, or `None` for a perfect conductor.
    fn susceptibility(&self, xi: f64) -> Option<f64> {
        match *self {
            Self::PerfectConductor => None,
            Self::Plasma { omega_p } => Some(omega_p * omega_p / (xi * xi)),
            Self::Drude { omega_p, gamma } => Some(omega_p * omega_p / (xi * (xi + gamma))),
            Self::Constant { eps } => Some(eps - 1.0),
            Self::Vacuum => Some(0.0),
        }
    }
}

/// `ε(iξ) = 1 + ω_p²/(ξ(ξ + γ))` and friends.
///
/// A perfect conductor returns `f64::INFINITY` as a sentinel; callers that
/// need reflection coefficients should use [`fresnel_imag`] instead.
pub fn epsilon_imag(model: &DielectricModel, xi: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(domain("epsilon_imag", format!("xi must be positive, got {xi}")));
    }
    Ok(model.susceptibility(xi).map_or(f64::INFINITY, |chi| 1.0 + chi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPair {
    pub r_te: f64,
    pub r_tm: f64,
}

impl ReflectionPair {
    pub const PERFECT: Self = Self { r_te: -1.0, r_tm: 1.0 };
    pub const NONE: Self = Self { r_te: 0.0, r_tm: 0.0 };
}

/// Reflection coefficients at `ξ > 0` parametrised by `q = √(k² + ξ²) ≥ ξ`.
///
/// `q − q̃` is evaluated as `−(ε − 1)ξ²/(q + q̃)` so that the TE coefficient
/// keeps full relative accuracy at grazing momenta.
pub(crate) fn fresnel_in_q(model: &DielectricModel, xi: f64, q: f64) -> ReflectionPair {
    let Some(chi) = model.susceptibility(xi) else {
        return ReflectionPair::PERFECT;
    };
    let eps = 1.0 + chi;
    let qt = (q * q + chi * xi * xi).sqrt();
    let s = q + qt;
    ReflectionPair {
        r_te: -chi * xi * xi / (s * s),
        r_tm: (eps * q - qt) / (eps * q + qt),
    }
}

/// Fresnel coefficients `r_te = (q − q̃)/(q + q̃)`, `r_tm = (εq − q̃)/(εq + q̃)`
/// with `q = √(k⊥² + ξ²)`, `q̃ = √(k⊥² + εξ²)`.
///
/// At `ξ = 0` the static limit of [`reflection_zero_mode`] is returned.
pub fn fresnel_imag(model: &DielectricModel, xi: f64, k_perp: f64) -> Result<ReflectionPair> {
    if !(xi >= 0.0 && k_perp >= 0.0) || !(xi.is_finite() && k_perp.is_finite()) {
        return Err(domain("fresnel_imag", format!("need xi, k_perp ≥ 0, got ({xi}, {k_perp})")));
    }
    if xi == 0.0 {
        if k_perp == 0.0 {
            return Err(domain("fresnel_imag", "xi and k_perp cannot both vanish"));
        }
        return reflection_zero_mode(model, k_perp);
    }
    Ok(fresnel_in_q(model, xi, k_perp.hypot(xi)))
}

/// Static (`n = 0` Matsubara) reflection coefficients.
///
/// Drude with `γ > 0`: `(0, 1)`. Plasma (and Drude with `γ = 0`):
/// `r_te = (k − √(k² + ω_p²))/(k + √(k² + ω_p²))`, `r_tm = 1`. Perfect
/// conductor: `(−1, 1)`. Constant `ε`: `(0, (ε − 1)/(ε + 1))`.
pub fn reflection_zero_mode(model: &DielectricModel, k_perp: f64) -> Result<ReflectionPair> {
    if !(k_perp > 0.0) || !k_perp.is_finite() {
        return Err(domain("reflection_zero_mode", format!("k_perp must be positive, got {k_perp}")));
    }
    let plasma_te = |wp: f64| {
        let s = k_perp + k_perp.hypot(wp);
        -wp * wp / (s * s)
    };
    Ok(match *model {
        DielectricModel::PerfectConductor => ReflectionPair::PERFECT,
        DielectricModel::Plasma { omega_p } => ReflectionPair {
            r_te: plasma_te(omega_p),
            r_tm: 1.0,
        },
        DielectricModel::Drude { omega_p, gamma } if gamma == 0.0 => ReflectionPair {
            r_te: plasma_te(omega_p),
            r_tm: 1.0,
        },
        DielectricModel::Drude { .. } => ReflectionPair { r_te: 0.0, r_tm: 1.0 },
        DielectricModel::Constant { eps } => ReflectionPair {
            r_te: 0.0,
            r_tm: (eps - 1.0) / (eps + 1.0),
        },
        DielectricModel::Vacuum => ReflectionPair::NONE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permittivity_examples() {
        let d = DielectricModel::drude(1.0, 1.0).unwrap();
        assert_eq!(epsilon_imag(&d, 1.0).unwrap(), 1.5);
        let p = DielectricModel::plasma(2.0).unwrap();
        assert_eq!(epsilon_imag(&p, 1.0).unwrap(), 5.0);
        assert_eq!(epsilon_imag(&DielectricModel::Vacuum, 3.0).unwrap(), 1.0);
        assert!(epsilon_imag(&p, 0.0).is_err());
        assert!(epsilon_imag(&DielectricModel::PerfectConductor, 1.0).unwrap().is_infinite());
    }

    #[test]
    fn construction_validates() {
        assert!(DielectricModel::plasma(0.0).is_err());
        assert!(DielectricModel::drude(1.0, -1.0).is_err());
        assert!(DielectricModel::constant(0.5).is_err());
    }

    #[test]
    fn drude_without_damping_is_plasma() {
        let d = DielectricModel::drude(3.0, 0.0).unwrap();
        let p = DielectricModel::plasma(3.0).unwrap();
        for (xi, k) in [(0.0, 0.5), (0.1, 2.0), (5.0, 0.0), (40.0, 7.0)] {
            assert_eq!(fresnel_imag(&d, xi, k).unwrap(), fresnel_imag(&p, xi, k).unwrap());
        }
    }

    #[test]
    fn limits() {
        assert_eq!(
            fresnel_imag(&DielectricModel::PerfectConductor, 2.0, 1.0).unwrap(),
            ReflectionPair::PERFECT
        );
        assert_eq!(fresnel_imag(&DielectricModel::Vacuum, 2.0, 1.0).unwrap(), ReflectionPair::NONE);
        let d = DielectricModel::drude(1.0, 0.1).unwrap();
        let r = fresnel_imag(&d, 1e-9, 1.0).unwrap();
        assert!(r.r_te.abs() < 1e-6 && (r.r_tm - 1.0).abs() < 1e-6);
        let z = reflection_zero_mode(&d, 1.0).unwrap();
        assert_eq!(z, ReflectionPair { r_te: 0.0, r_tm: 1.0 });
        assert!(fresnel_imag(&d, 0.0, 0.0).is_err());
    }

    #[test]
    fn plasma_zero_mode_asymptotics() {
        let wp = 1.0;
        let k = 1e3;
        let r = reflection_zero_mode(&DielectricModel::Plasma { omega_p: wp }, k).unwrap();
        let lead = -wp * wp / (4.0 * k * k);
        assert!(((r.r_te - lead) / lead).abs() < 1e-6);
    }
}
