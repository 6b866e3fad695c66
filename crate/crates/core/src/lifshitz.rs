//! Parallel plates: Lifshitz energy at `T = 0` and Matsubara free energy.
//!
//! Per polarisation `p` the energy per area is
//!
//! ```text
//! E_p/A = (1/2π) ∫₀^∞ dξ ∫ k dk/2π  ln(1 − r_p¹ r_p² e^{−2qa}),   q = √(k² + ξ²)
//! ```
//!
//! and at `T > 0` the `ξ` integral becomes `T Σ'_n` over `ξ_n = 2πnT`. The
//! transverse integral runs over `q ∈ [ξ, ∞)` using `k dk = q dq`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::materials::{fresnel_in_q, reflection_zero_mode, DielectricModel, ReflectionPair};
use crate::numerics::{
    integrate_semiinfinite_vec, matsubara_sum_vec, MatsubaraGrid, QuadratureOptions,
};

/// `U(d) = −α π²/(1440 d³)`, the ideal parallel-plate energy per area.
pub fn ideal_plate_energy_density(alpha: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(invalid("d", format!("separation must be positive, got {d}")));
    }
    Ok(-alpha * PI * PI / (1440.0 * d * d * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateConfig {
    pub a: f64,
    pub model_1: DielectricModel,
    pub model_2: DielectricModel,
    /// `k_B T/ħc`; zero selects the `ξ` integral.
    pub temperature: f64,
    /// Relative tolerance of the outer quadrature or Matsubara tail.
    pub tol: f64,
}

impl PlateConfig {
    pub fn new(a: f64, model_1: DielectricModel, model_2: DielectricModel, temperature: f64) -> Self {
        Self {
            a,
            model_1,
            model_2,
            temperature,
            tol: 1e-8,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(invalid("a", format!("separation must be positive, got {}", self.a)));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(invalid("temperature", format!("must be non-negative, got {}", self.temperature)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        self.model_1.validate()?;
        self.model_2.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateEnergyBreakdown {
    pub total: f64,
    pub te: f64,
    pub tm: f64,
    /// The weighted `n = 0` Matsubara term, both polarisations.
    pub zero_mode: f64,
    /// TE part of `zero_mode`.
    pub zero_mode_te: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Number of Matsubara terms summed; zero on the `T = 0` path.
    pub matsubara_terms: usize,
}

/// `∫_ξ^∞ q dq/2π ln(1 − r¹r² e^{−2qa})` for (TE, TM).
fn transverse_integral(cfg: &PlateConfig, xi: f64, opts: &QuadratureOptions) -> Result<[f64; 2]> {
    let a = cfg.a;
    let reflect = |q: f64| -> Result<(ReflectionPair, ReflectionPair)> {
        if xi == 0.0 {
            Ok((reflection_zero_mode(&cfg.model_1, q)?, reflection_zero_mode(&cfg.model_2, q)?))
        } else {
            Ok((fresnel_in_q(&cfg.model_1, xi, q), fresnel_in_q(&cfg.model_2, xi, q)))
        }
    };
    let f = |q: f64| -> Result<Vec<f64>> {
        let (r1, r2) = reflect(q)?;
        let decay = (-2.0 * q * a).exp();
        let w = q / (2.0 * PI);
        Ok(vec![
            w * (-(r1.r_te * r2.r_te * decay)).ln_1p(),
            w * (-(r1.r_tm * r2.r_tm * decay)).ln_1p(),
        ])
    };
    let r = integrate_semiinfinite_vec(f, 2, xi, opts)?;
    Ok([r[0].value, r[1].value])
}

fn inner_options(cfg: &PlateConfig) -> QuadratureOptions {
    QuadratureOptions::with_tol(cfg.tol * 0.01)
        .scale(0.5 / cfg.a)
        .abs_tol(1e-300)
}

/// Zero-temperature energy per area via the `ξ` integral.
pub fn plate_energy_t0(config: &PlateConfig) -> Result<PlateEnergyBreakdown> {
    config.validate()?;
    let inner = inner_options(config);
    let outer = QuadratureOptions::with_tol(config.tol)
        .scale(0.5 / config.a)
        .abs_tol(1e-300)
        .parallel(true);
    let r = integrate_semiinfinite_vec(
        |xi| transverse_integral(config, xi, &inner).map(|v| v.iter().map(|x| x / (2.0 * PI)).collect()),
        2,
        0.0,
        &outer,
    )?;
    let (te, tm) = (r[0].value, r[1].value);
    Ok(PlateEnergyBreakdown {
        total: te + tm,
        te,
        tm,
        zero_mode: 0.0,
        zero_mode_te: 0.0,
        error_estimate: r[0].error_estimate + r[1].error_estimate,
        evaluations: r[0].evaluations,
        matsubara_terms: 0,
    })
}

/// Free energy per area `T Σ'_n` at `T > 0`; the weighted `n = 0` term
/// uses the static reflection coefficients and is reported separately.
pub fn plate_free_energy(config: &PlateConfig) -> Result<PlateEnergyBreakdown> {
    config.validate()?;
    let grid = MatsubaraGrid::new(config.temperature)?;
    let inner = inner_options(config);
    let s = matsubara_sum_vec(
        |_, xi| transverse_integral(config, xi, &inner).map(|v| v.to_vec()),
        2,
        &grid,
        config.tol,
        true,
    )?;
    let (te, tm) = (s.values[0], s.values[1]);
    Ok(PlateEnergyBreakdown {
        total: te + tm,
        te,
        tm,
        zero_mode: s.zero_mode[0] + s.zero_mode[1],
        zero_mode_te: s.zero_mode[0],
        error_estimate: s.tail_estimate + config.tol * 0.01 * (te + tm).abs(),
        evaluations: s.terms,
        matsubara_terms: s.terms,
    })
}

/// Dispatches on `temperature`: zero uses the `ξ` integral, positive the
/// Matsubara sum.
pub fn plate_energy(config: &PlateConfig) -> Result<PlateEnergyBreakdown> {
    if config.temperature == 0.0 {
        plate_energy_t0(config)
    } else {
        plate_free_energy(config)
    }
}
