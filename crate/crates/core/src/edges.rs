//! Edge geometries: the strip-above-plate expansion and the determinant for
//! a half-plane perpendicular to a plane.
//!
//! The half-plane energy per unit edge length is
//!
//! ```text
//! E/L = ∫₀^∞ (q dq/4π) ln det(δ_{νν'} − (−1)^ν k_{−ν−ν'−1}(2qH)) = −C⊥/H²
//! ```
//!
//! with `k_ν` the Bateman function. Substituting `u = 2qH` gives
//! `C⊥ = −(1/16π) ∫₀^∞ u ln det(1 − M(u)) du`, free of `H`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::numerics::{
    integrate_semiinfinite_vec, integrate_semiinfinite_with, log_det_one_minus_minors, QuadratureOptions,
};

pub const STRIP_BETA: f64 = 0.00092;
pub const STRIP_GAMMA: f64 = -0.0040;

/// Default determinant truncation for the half-plane.
pub const DEFAULT_NU_MAX: usize = 10;

/// Lower end of the `u = 2qH` integral.
pub const HALFPLANE_U_MIN: f64 = 2e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripConfig {
    /// Half of the strip width.
    pub half_width: f64,
    /// Height above the plate.
    pub h: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StripConfig {
    pub fn new(half_width: f64, h: f64) -> Self {
        Self {
            half_width,
            h,
            beta: STRIP_BETA,
            gamma: STRIP_GAMMA,
        }
    }

    pub fn with_constants(mut self, beta: f64, gamma: f64) -> Self {
        self.beta = beta;
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("half_width", self.half_width), ("H", self.h)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.beta.is_finite() && self.gamma.is_finite()) {
            return Err(invalid("beta/gamma", "edge constants must be finite"));
        }
        Ok(())
    }

    /// The expansion degrades when the strip is narrower than its height.
    pub fn outside_validity(&self) -> bool {
        2.0 * self.half_width < self.h
    }
}

/// `E/L = −(π²/720)(2d/H³) + 2β/H² + γ/(2dH)`.
pub fn strip_energy_per_length(config: &StripConfig) -> Result<f64> {
    config.validate()?;
    let w = 2.0 * config.half_width;
    let h = config.h;
    Ok(-PI * PI / 720.0 * w / (h * h * h) + 2.0 * config.beta / (h * h) + config.gamma / (w * h))
}

/// `sin(πν/2)/(πν/2)`, the value of `k_ν(0)`.
fn sinc_half(nu: f64) -> f64 {
    if nu == 0.0 {
        1.0
    } else {
        let a = 0.5 * PI * nu;
        a.sin() / a
    }
}

/// `k_ν(x)` for `ν < 2` from
/// `k_ν(x) = e^{−x} k_ν(0) ∫₀^∞ e^{−t} (t/(t + 2x))^{−ν/2} dt`.
///
/// For `0 < ν < 2` the substitution `t = s^p`, `p = 1/(1 − ν/2)`, removes
/// the endpoint singularity.
fn bateman_low(nu: f64, x: f64, tol: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(sinc_half(nu));
    }
    let pref = sinc_half(nu);
    if pref == 0.0 {
        return Ok(0.0);
    }
    let opts = QuadratureOptions::with_tol(tol);
    let integral = if nu <= 0.0 {
        integrate_semiinfinite_with(
            |t| {
                if t > 750.0 {
                    return Ok(0.0);
                }
                Ok((-t).exp() * (t / (t + 2.0 * x)).powf(-0.5 * nu))
            },
            0.0,
            &opts,
        )?
    } else {
        let p = 1.0 / (1.0 - 0.5 * nu);
        integrate_semiinfinite_with(
            |s| {
                let t = s.powf(p);
                if t > 750.0 {
                    return Ok(0.0);
                }
                Ok(p * (-t).exp() * (t + 2.0 * x).powf(0.5 * nu))
            },
            0.0,
            &opts,
        )?
    };
    Ok((-x).exp() * pref * integral.value)
}

/// Bateman's `k_ν(x) = (2/π) ∫₀^{π/2} cos(x tan θ − νθ) dθ` for real `ν`.
///
/// Orders below 2 use a non-oscillatory integral; higher orders come from
/// `(ν + 2) k_{ν+2} = 2(2x − ν) k_ν − (ν − 2) k_{ν−2}`.
pub fn bateman_k(nu: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() || !nu.is_finite() {
        return Err(domain("bateman_k", format!("need finite ν and x ≥ 0, got ({nu}, {x})")));
    }
    const TOL: f64 = 1e-13;
    if nu < 2.0 {
        return bateman_low(nu, x, TOL);
    }
    let steps = ((nu - 2.0) / 2.0).floor() as usize + 1;
    let mut v = nu - 2.0 * steps as f64;
    let mut prev = bateman_low(v - 2.0, x, TOL)?;
    let mut cur = bateman_low(v, x, TOL)?;
    for _ in 0..steps {
        let next = (2.0 * (2.0 * x - v) * cur - (v - 2.0) * prev) / (v + 2.0);
        prev = cur;
        cur = next;
        v += 2.0;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneConfig {
    pub h: f64,
    pub nu_max: usize,
    pub tol: f64,
}

impl HalfPlaneConfig {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            nu_max: DEFAULT_NU_MAX,
            tol: 1e-8,
        }
    }

    pub fn with_nu_max(mut self, nu_max: usize) -> Self {
        self.nu_max = nu_max;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(invalid("H", format!("must be positive, got {}", self.h)));
        }
        if self.nu_max < 4 {
            return Err(invalid("nu_max", format!("must be at least 4, got {}", self.nu_max)));
        }
        if self.nu_max > 60 {
            return Err(invalid("nu_max", format!("at most 60 supported, got {}", self.nu_max)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneResult {
    pub energy_per_length: f64,
    /// Extrapolated in the truncation.
    pub c_perp: f64,
    /// `C⊥` at `nu_max`.
    pub c_perp_raw: f64,
    /// `C⊥` at `nu_max − 2`.
    pub c_perp_lower: f64,
    pub nu_max: usize,
    pub quadrature_error: f64,
    /// `|c_perp − c_perp_raw|`.
    pub extrapolation_spread: f64,
    /// Estimate of the omitted `u < u_min` piece.
    pub cutoff_sensitivity: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// `(−1)^ν k_{−ν−ν'−1}(u)` for `ν, ν' ≤ n_max`; only even `ν + ν'` survive.
pub fn halfplane_matrix(nu_max: usize, u: f64) -> Result<DMatrix<f64>> {
    let ks = negative_odd_orders(nu_max, u)?;
    Ok(matrix_from(nu_max, &ks))
}

/// `k_{−1}, k_{−3}, …, k_{−(2n+1)}` at `u`.
fn negative_odd_orders(nu_max: usize, u: f64) -> Result<Vec<f64>> {
    (0..=nu_max).map(|j| bateman_k(-(2.0 * j as f64 + 1.0), u)).collect()
}

fn matrix_from(nu_max: usize, ks: &[f64]) -> DMatrix<f64> {
    let n = nu_max + 1;
    DMatrix::from_fn(n, n, |a, b| {
        if (a + b) % 2 == 1 {
            return 0.0;
        }
        let v = ks[(a + b) / 2];
        if a % 2 == 0 {
            v
        } else {
            -v
        }
    })
}

/// `−(1/16π) u ln det(1 − M(u))` at both truncations.
fn c_perp_integrand(nu_max: usize, u: f64) -> Result<[f64; 2]> {
    if u > 700.0 {
        return Ok([0.0; 2]);
    }
    let ks = negative_odd_orders(nu_max, u)?;
    let minors = log_det_one_minus_minors(&matrix_from(nu_max, &ks))?;
    let w = -u / (16.0 * PI);
    Ok([w * minors[nu_max - 2], w * minors[nu_max]])
}

/// Richardson step assuming `C_n = C + a/n²` with `n = nu_max + 1`.
fn richardson(nu_max: usize, lower: f64, upper: f64) -> f64 {
    let n = (nu_max + 1) as f64;
    let m = n - 2.0;
    (n * n * upper - m * m * lower) / (n * n - m * m)
}

/// Half-plane perpendicular to a plane, edge at height `H`.
pub fn halfplane_perp_energy(config: &HalfPlaneConfig) -> Result<HalfPlaneResult> {
    config.validate()?;
    let nu = config.nu_max;
    let opts = QuadratureOptions::with_tol(config.tol).abs_tol(1e-300).parallel(true);
    let r = integrate_semiinfinite_vec(|u| c_perp_integrand(nu, u).map(|v| v.to_vec()), 2, HALFPLANE_U_MIN, &opts)?;
    let (lower, upper) = (r[0].value, r[1].value);
    let c_perp = richardson(nu, lower, upper);
    // The integrand vanishes like u at the origin, so the dropped piece is about half a trapezoid.
    let edge = c_perp_integrand(nu, HALFPLANE_U_MIN)?[1];
    let cutoff_sensitivity = 0.5 * edge.abs() * HALFPLANE_U_MIN;
    let spread = (c_perp - upper).abs();
    let h = config.h;
    Ok(HalfPlaneResult {
        energy_per_length: -c_perp / (h * h),
        c_perp,
        c_perp_raw: upper,
        c_perp_lower: lower,
        nu_max: nu,
        quadrature_error: r[1].error_estimate,
        extrapolation_spread: spread,
        cutoff_sensitivity,
        error_estimate: r[1].error_estimate + spread + cutoff_sensitivity,
        evaluations: r[1].evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_examples() {
        let e = strip_energy_per_length(&StripConfig::new(5.0, 1.0)).unwrap();
        let exact = -PI * PI / 72.0 + 2.0 * 0.00092 - 0.0004;
        assert!((e - exact).abs() < 1e-15);
        assert!((e + 0.135_638).abs() < 1e-6);
        let bare = strip_energy_per_length(&StripConfig::new(5.0, 1.0).with_constants(0.0, 0.0)).unwrap();
        assert!((bare + PI * PI / 72.0).abs() < 1e-15);
        assert!(StripConfig::new(0.2, 1.0).outside_validity());
        assert!(strip_energy_per_length(&StripConfig::new(-1.0, 1.0)).is_err());
    }

    #[test]
    fn strip_power_counting() {
        let base = StripConfig::new(5.0, 1.0);
        let parts = |c: &StripConfig, b: f64, g: f64| strip_energy_per_length(&c.with_constants(b, g)).unwrap();
        let up = StripConfig::new(5.0, 2.0);
        assert!((parts(&up, 0.0, 0.0) * 8.0 - parts(&base, 0.0, 0.0)).abs() < 1e-15);
        let edge = |c: &StripConfig| parts(c, 1.0, 0.0) - parts(c, 0.0, 0.0);
        assert!((edge(&up) * 4.0 - edge(&base)).abs() < 1e-14);
        let inter = |c: &StripConfig| parts(c, 0.0, 1.0) - parts(c, 0.0, 0.0);
        assert!((inter(&up) * 2.0 - inter(&base)).abs() < 1e-14);
    }

    #[test]
    fn bateman_at_origin() {
        assert_eq!(bateman_k(0.0, 0.0).unwrap(), 1.0);
        assert!(bateman_k(2.0, 0.0).unwrap().abs() < 1e-16);
        assert!((bateman_k(-1.0, 0.0).unwrap() - 2.0 / PI).abs() < 1e-16);
        assert!((bateman_k(3.0, 0.0).unwrap() + 2.0 / (3.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn bateman_order_zero_is_exponential() {
        for x in [0.1, 1.0, 7.5] {
            assert!((bateman_k(0.0, x).unwrap() / (-x).exp() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bateman_order_two_closed_form() {
        // k₂(x) = 2x e^{−x}·k₀(0)-normalised: (2/π)∫cos(x tanθ − 2θ) = 2x e^{−x}.
        for x in [0.3, 1.0, 4.0] {
            let v = bateman_k(2.0, x).unwrap();
            assert!((v / (2.0 * x * (-x).exp()) - 1.0).abs() < 1e-11, "{x}: {v}");
        }
    }

    #[test]
    fn matrix_parity_and_decay() {
        let m1 = halfplane_matrix(6, 1.0).unwrap();
        let m40 = halfplane_matrix(6, 40.0).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                if (a + b) % 2 == 1 {
                    assert_eq!(m1[(a, b)], 0.0);
                } else {
                    assert!(m40[(a, b)].abs() < 1e-10 * m1[(a, b)].abs());
                }
            }
        }
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(halfplane_perp_energy(&HalfPlaneConfig::new(1.0).with_nu_max(3)).is_err());
        assert!(halfplane_perp_energy(&HalfPlaneConfig::new(0.0)).is_err());
    }
}
