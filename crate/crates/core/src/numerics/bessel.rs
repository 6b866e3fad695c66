//! Modified spherical Bessel functions of integer order.
//!
//! Conventions:
//!
//! * `i_l(x) = √(π/2x) I_{l+1/2}(x)`, the regular solution, `i₀(x) = sinh(x)/x`;
//! * `k_l(x) = √(π/2x) K_{l+1/2}(x)`, so that `k₀(x) = (π/2) e^{−x}/x`.
//!
//! The `π/2` carried by `k_l` cancels in every T-matrix ratio. With these
//! conventions the Wronskian reads `i_l k_l' − i_l' k_l = −(π/2)/x²`.
//!
//! `i_l` comes from the backward continued fraction for `r_j = i_j/i_{j−1}`
//! (Miller's algorithm in ratio form), `k_l` from upward recurrence of
//! `s_j = k_j/k_{j−1}`. Both are accumulated in log space so the `ln_*`
//! variants remain finite far outside the double range.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, CasimirError, Result};

/// Largest order the coefficient tables and tests are validated for.
pub const MAX_ORDER: usize = 200;

fn check_args(func: &'static str, l: usize, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(func, format!("x must be positive and finite, got {x}")));
    }
    if l > MAX_ORDER {
        return Err(CasimirError::TruncationTooLarge {
            requested: l,
            supported: MAX_ORDER,
        });
    }
    Ok(())
}

/// `ln(sinh(x)/x)` without overflow or cancellation.
fn ln_i0(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if x < 20.0 {
        (x.sinh() / x).ln()
    } else {
        x - (2.0 * x).ln() + (-(-2.0 * x).exp()).ln_1p()
    }
}

fn ln_k0(x: f64) -> f64 {
    FRAC_PI_2.ln() - x - x.ln()
}

/// Ratios `r_j = i_j(x)/i_{j−1}(x)` for `j = 1..=n`, index 0 unused.
fn i_ratios(n: usize, x: f64) -> Vec<f64> {
    let start = ((n * n) as f64 + 50.0 * x).sqrt().ceil() as usize + 30;
    let start = start.max(n + 1);
    let mut out = vec![0.0; n + 1];
    let mut r = 0.0;
    for j in (1..=start).rev() {
        r = x / ((2 * j + 1) as f64 + x * r);
        if j <= n {
            out[j] = r;
        }
    }
    out
}

/// Ratios `s_j = k_j(x)/k_{j−1}(x)` for `j = 1..=n`, index 0 unused.
fn k_ratios(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if n == 0 {
        return out;
    }
    out[1] = 1.0 + 1.0 / x;
    for j in 1..n {
        out[j + 1] = (2 * j + 1) as f64 / x + 1.0 / out[j];
    }
    out
}

/// `ln i_l(x)`.
pub fn ln_modified_spherical_bessel_i(l: usize, x: f64) -> Result<f64> {
    check_args("ln_modified_spherical_bessel_i", l, x)?;
    let r = i_ratios(l, x);
    Ok(ln_i0(x) + r[1..].iter().map(|v| v.ln()).sum::<f64>())
}

/// `ln k_l(x)`.
pub fn ln_modified_spherical_bessel_k(l: usize, x: f64) -> Result<f64> {
    check_args("ln_modified_spherical_bessel_k", l, x)?;
    let s = k_ratios(l, x);
    Ok(ln_k0(x) + s[1..].iter().map(|v| v.ln()).sum::<f64>())
}

/// Regular modified spherical Bessel function `i_l(x)`.
///
/// Overflow (roughly `x > 700`) is reported rather than returned as `inf`;
/// use [`ln_modified_spherical_bessel_i`] there.
pub fn modified_spherical_bessel_i(l: usize, x: f64) -> Result<f64> {
    check_args("modified_spherical_bessel_i", l, x)?;
    let i0 = if x < 1e-4 {
        x.mul_add(x / 6.0, 1.0)
    } else {
        x.sinh() / x
    };
    if !i0.is_finite() {
        return Err(CasimirError::Overflow {
            func: "modified_spherical_bessel_i",
            detail: format!("i_{l}({x})"),
        });
    }
    let r = i_ratios(l, x);
    Ok(r[1..].iter().fold(i0, |acc, v| acc * v))
}

/// Modified spherical Bessel function of the third kind `k_l(x)` with the
/// `π/2` normalisation described in the module docs.
pub fn modified_spherical_bessel_k(l: usize, x: f64) -> Result<f64> {
    check_args("modified_spherical_bessel_k", l, x)?;
    let s = k_ratios(l, x);
    let ln = ln_k0(x) + s[1..].iter().map(|v| v.ln()).sum::<f64>();
    if ln > f64::MAX.ln() {
        return Err(CasimirError::Overflow {
            func: "modified_spherical_bessel_k",
            detail: format!("k_{l}({x}) = exp({ln:.1})"),
        });
    }
    let k0 = FRAC_PI_2 * (-x).exp() / x;
    if k0 == 0.0 || !k0.is_finite() || ln < -700.0 || ln > 700.0 {
        return Ok(ln.exp());
    }
    Ok(s[1..].iter().fold(k0, |acc, v| acc * v))
}

/// Log values and logarithmic derivatives of `i_l`, `k_l` for `l = 0..=l_max`.
#[derive(Debug, Clone)]
pub struct BesselSequence {
    pub x: f64,
    pub ln_i: Vec<f64>,
    pub ln_k: Vec<f64>,
    /// `i_l'(x)/i_l(x)`, always positive.
    pub di: Vec<f64>,
    /// `k_l'(x)/k_l(x)`, always negative.
    pub dk: Vec<f64>,
}

impl BesselSequence {
    pub fn new(l_max: usize, x: f64) -> Result<Self> {
        check_args("BesselSequence", l_max, x)?;
        let r = i_ratios(l_max + 1, x);
        let s = k_ratios(l_max + 1, x);
        let mut ln_i = Vec::with_capacity(l_max + 1);
        let mut ln_k = Vec::with_capacity(l_max + 1);
        let mut di = Vec::with_capacity(l_max + 1);
        let mut dk = Vec::with_capacity(l_max + 1);
        let (mut li, mut lk) = (ln_i0(x), ln_k0(x));
        for l in 0..=l_max {
            if l > 0 {
                li += r[l].ln();
                lk += s[l].ln();
            }
            ln_i.push(li);
            ln_k.push(lk);
            let lx = l as f64 / x;
            di.push(r[l + 1] + lx);
            dk.push(lx - s[l + 1]);
        }
        Ok(Self { x, ln_i, ln_k, di, dk })
    }
}

/// `ln k_L(x)` for `L = 0..=n`.
pub fn ln_k_sequence(n: usize, x: f64) -> Result<Vec<f64>> {
    check_args("ln_k_sequence", n, x)?;
    let s = k_ratios(n, x);
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = ln_k0(x);
    out.push(acc);
    for v in &s[1..] {
        acc += v.ln();
        out.push(acc);
    }
    Ok(out)
}
