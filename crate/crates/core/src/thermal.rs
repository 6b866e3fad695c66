//! Finite-temperature plates: low-temperature expansion, the Drude TE zero
//! mode, and temperature sweeps with numerical entropy.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lifshitz::{plate_energy_t0, plate_free_energy, PlateConfig};
use crate::materials::DielectricModel;
use crate::numerics::{integrate_semiinfinite_with, QuadratureOptions, QuadratureResult};

pub const ZETA3: f64 = 1.2020569031595943;

/// Relative temperature step of the centred entropy difference.
pub const ENTROPY_STEP: f64 = 1e-3;

/// Terms of `F/A = −π²/720a³ − (ζ(3)/2π)T³ + (π²a/45)T⁴` for ideal mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaLimitTerms {
    pub t0: f64,
    pub t3: f64,
    pub t4: f64,
    /// Set when `Ta > 0.3`, where the expansion is no longer small.
    pub outside_validity: bool,
}

pub fn plasma_limit_coefficients(a: f64, t: f64) -> Result<PlasmaLimitTerms> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid("a", format!("must be positive, got {a}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid("T", format!("must be non-negative, got {t}")));
    }
    Ok(PlasmaLimitTerms {
        t0: -PI * PI / (720.0 * a * a * a),
        t3: -ZETA3 / (2.0 * PI) * t * t * t,
        t4: PI * PI * a / 45.0 * t.powi(4),
        outside_validity: t * a > 0.3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeDeficit {
    /// `−ζ(3)T/(16πa²)`.
    pub closed_form: f64,
    /// `(T/4π) ∫₀^∞ k ln(1 − e^{−2ka}) dk`.
    pub quadrature: QuadratureResult,
}

/// The TE `n = 0` term that a Drude metal lacks relative to a perfect mirror.
pub fn drude_zero_mode_deficit(a: f64, t: f64) -> Result<ZeroModeDeficit> {
    for (name, v) in [("a", a), ("T", t)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(name, format!("must be positive, got {v}")));
        }
    }
    let opts = QuadratureOptions::with_tol(1e-13).scale(0.5 / a);
    let q = integrate_semiinfinite_with(
        |k| {
            let x = 2.0 * k * a;
            if x > 740.0 {
                return Ok(0.0);
            }
            Ok(k * (-(-x).exp_m1()).ln())
        },
        0.0,
        &opts,
    )?;
    let f = t / (4.0 * PI);
    Ok(ZeroModeDeficit {
        closed_form: -ZETA3 * t / (16.0 * PI * a * a),
        quadrature: QuadratureResult {
            value: f * q.value,
            error_estimate: f * q.error_estimate,
            evaluations: q.evaluations,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalSweep {
    pub separations: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub model_1: DielectricModel,
    pub model_2: DielectricModel,
    pub tol: f64,
}

impl ThermalSweep {
    pub fn new(separations: Vec<f64>, temperatures: Vec<f64>, model_1: DielectricModel, model_2: DielectricModel) -> Self {
        Self {
            separations,
            temperatures,
            model_1,
            model_2,
            tol: 1e-8,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_grid("separations", &self.separations)?;
        check_grid("temperatures", &self.temperatures)?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        self.model_1.validate()?;
        self.model_2.validate()
    }
}

fn check_grid(name: &'static str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(invalid(name, "entries must be positive and finite"));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "must be strictly increasing"));
    }
    Ok(())
}

/// Drude minus plasma at the same `ω_p`, compared with the missing TE zero mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeCheck {
    pub difference: f64,
    /// Minus the plasma TE zero mode per plate pair.
    pub expected: f64,
    /// `+ζ(3)T/(16πa²)`, the ideal-mirror limit of `expected`.
    pub ideal: f64,
    pub budget: f64,
    pub within_budget: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalPoint {
    pub a: f64,
    pub t: f64,
    pub free_energy: f64,
    /// `−∂F/∂T` per area.
    pub entropy: f64,
    /// The weighted `n = 0` Matsubara term, both polarisations.
    pub zero_mode_share: f64,
    pub error_estimate: f64,
    pub zero_mode_check: Option<ZeroModeCheck>,
    pub error: Option<String>,
}

fn drude_plasma_partner(m: &DielectricModel) -> Option<DielectricModel> {
    match *m {
        DielectricModel::Drude { omega_p, gamma } if gamma > 0.0 && gamma <= 1e-6 * omega_p => {
            Some(DielectricModel::Plasma { omega_p })
        }
        _ => None,
    }
}

fn sweep_point(s: &ThermalSweep, a: f64, t: f64) -> Result<ThermalPoint> {
    let cfg = |t: f64| PlateConfig::new(a, s.model_1, s.model_2, t).with_tol(s.tol);
    let centre = plate_free_energy(&cfg(t))?;
    let (lo, hi) = (t * (1.0 - ENTROPY_STEP), t * (1.0 + ENTROPY_STEP));
    let f_lo = plate_free_energy(&cfg(lo))?;
    let f_hi = plate_free_energy(&cfg(hi))?;
    let entropy = -(f_hi.total - f_lo.total) / (hi - lo);
    let zero_mode_check = match (drude_plasma_partner(&s.model_1), drude_plasma_partner(&s.model_2)) {
        (Some(p1), Some(p2)) => {
            let plasma = plate_free_energy(&PlateConfig::new(a, p1, p2, t).with_tol(s.tol))?;
            let difference = centre.total - plasma.total;
            let expected = -plasma.zero_mode_te;
            let budget = centre.error_estimate + plasma.error_estimate + 1e-6 * plasma.total.abs();
            Some(ZeroModeCheck {
                difference,
                expected,
                ideal: ZETA3 * t / (16.0 * PI * a * a),
                budget,
                within_budget: (difference - expected).abs() <= budget,
            })
        }
        _ => None,
    };
    Ok(ThermalPoint {
        a,
        t,
        free_energy: centre.total,
        entropy,
        zero_mode_share: centre.zero_mode,
        error_estimate: centre.error_estimate,
        zero_mode_check,
        error: None,
    })
}

/// Every `(a, T)` pair of the grid, separations outermost. Failures at one
/// point are recorded in that row and do not stop the sweep.
pub fn thermal_sweep(sweep: &ThermalSweep) -> Result<Vec<ThermalPoint>> {
    sweep.validate()?;
    let grid: Vec<(f64, f64)> = sweep
        .separations
        .iter()
        .flat_map(|&a| sweep.temperatures.iter().map(move |&t| (a, t)))
        .collect();
    Ok(grid
        .par_iter()
        .map(|&(a, t)| {
            sweep_point(sweep, a, t).unwrap_or_else(|e| ThermalPoint {
                a,
                t,
                free_energy: f64::NAN,
                entropy: f64::NAN,
                zero_mode_share: f64::NAN,
                error_estimate: f64::NAN,
                zero_mode_check: None,
                error: Some(e.to_string()),
            })
        })
        .collect())
}

/// `F(T) − F(0)` for the plates of `config`, the quantity compared against
/// the low-temperature expansion.
pub fn thermal_correction(config: &PlateConfig) -> Result<f64> {
    let f = plate_free_energy(config)?;
    let zero = plate_energy_t0(&PlateConfig { temperature: 0.0, ..*config })?;
    Ok(f.total - zero.total)
}
