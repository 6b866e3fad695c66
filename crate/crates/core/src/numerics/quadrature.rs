//! Adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! Semi-infinite ranges `[lower, ∞)` are mapped onto `[0, 1)` through
//! `x = lower + s·t/(1 − t)` where `s` is an optional characteristic length
//! (default 1). Integrands that decay exponentially on the scale `s` become
//! smooth on the unit interval and the 21-point rule never touches either
//! endpoint, so singular Jacobians and `x = lower` are avoided.
//!
//! The integrators are vector valued so that several closely related
//! integrands (polarisations, truncation orders) share node evaluations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};
use crate::numerics::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Characteristic decay length of the integrand (semi-infinite map only).
    pub scale: f64,
    /// Number of equal pieces the unit interval is cut into before refinement.
    pub initial_intervals: usize,
    /// Evaluate the nodes of each refinement step on the rayon pool.
    pub parallel: bool,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 4000,
            scale: 1.0,
            initial_intervals: 8,
            parallel: false,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn initial_intervals(mut self, n: usize) -> Self {
        self.initial_intervals = n.max(1);
        self
    }

    fn effective_rel_tol(&self) -> f64 {
        self.rel_tol.max(100.0 * f64::EPSILON)
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Node abscissae of the 21-point rule on `[a, b]`, ordered
/// `center, center ± h·x_0, center ± h·x_1, …`.
fn nodes(a: f64, b: f64) -> [f64; 21] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [center; 21];
    for j in 0..10 {
        out[1 + 2 * j] = center - half * XGK[j];
        out[2 + 2 * j] = center + half * XGK[j];
    }
    out
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Kronrod estimate and rescaled error from 21 node values.
fn gk21(fv: &[f64; 21], half_len: f64) -> (f64, f64) {
    let f_center = fv[0];
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();
    for j in 0..10 {
        let f1 = fv[1 + 2 * j];
        let f2 = fv[2 + 2 * j];
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[1 + 2 * j] - mean).abs() + (fv[2 + 2 * j] - mean).abs());
    }
    let abs_half = half_len.abs();
    let err = (res_kronrod - res_gauss) * half_len;
    (
        res_kronrod * half_len,
        rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    )
}

#[derive(Debug, Clone)]
struct Segment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
}

fn evaluate_segments<G>(g: &G, dim: usize, bounds: &[(f64, f64)], parallel: bool) -> Result<Vec<Segment>>
where
    G: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let xs: Vec<f64> = bounds.iter().flat_map(|&(a, b)| nodes(a, b)).collect();
    let eval = |&x: &f64| -> Result<Vec<f64>> {
        let v = g(x)?;
        debug_assert_eq!(v.len(), dim);
        Ok(v)
    };
    let fx: Vec<Vec<f64>> = if parallel {
        xs.par_iter().map(eval).collect::<Result<_>>()?
    } else {
        xs.iter().map(eval).collect::<Result<_>>()?
    };
    let mut out = Vec::with_capacity(bounds.len());
    for (s, &(a, b)) in bounds.iter().enumerate() {
        let mut values = Vec::with_capacity(dim);
        let mut errors = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut fv = [0.0; 21];
            for (k, slot) in fv.iter_mut().enumerate() {
                *slot = fx[s * 21 + k][c];
            }
            if let Some(bad) = fv.iter().find(|v| !v.is_finite()) {
                return Err(CasimirError::Domain {
                    func: "quadrature",
                    detail: format!("integrand returned {bad} on [{a:e}, {b:e}]"),
                });
            }
            let (v, e) = gk21(&fv, 0.5 * (b - a));
            values.push(v);
            errors.push(e);
        }
        out.push(Segment { a, b, values, errors });
    }
    Ok(out)
}

/// Adaptive vector-valued integration of `g` over `[a, b]`.
fn adaptive<G>(g: &G, dim: usize, a: f64, b: f64, opts: &QuadratureOptions) -> Result<Vec<QuadratureResult>>
where
    G: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let rel_tol = opts.effective_rel_tol();
    let n0 = opts.initial_intervals.max(1);
    let width = (b - a) / n0 as f64;
    let bounds: Vec<(f64, f64)> = (0..n0)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == n0 { b } else { a + width * (i + 1) as f64 };
            (lo, hi)
        })
        .collect();
    let mut segments = evaluate_segments(g, dim, &bounds, opts.parallel)?;
    let mut evaluations = 21 * n0;

    loop {
        let totals: Vec<(f64, f64)> = (0..dim)
            .map(|c| {
                let v: CompensatedSum = segments.iter().map(|s| s.values[c]).collect();
                let e: CompensatedSum = segments.iter().map(|s| s.errors[c]).collect();
                (v.value(), e.value())
            })
            .collect();
        let targets: Vec<f64> = totals
            .iter()
            .map(|&(v, _)| (rel_tol * v.abs()).max(opts.abs_tol))
            .collect();
        let converged = totals.iter().zip(&targets).all(|(&(_, e), &t)| e <= t);
        let results = || {
            totals
                .iter()
                .map(|&(value, error_estimate)| QuadratureResult {
                    value,
                    error_estimate,
                    evaluations,
                })
                .collect::<Vec<_>>()
        };
        if converged {
            return Ok(results());
        }

        let score = |s: &Segment| -> f64 {
            s.errors
                .iter()
                .zip(&targets)
                .map(|(&e, &t)| if t > 0.0 { e / t } else if e > 0.0 { f64::MAX } else { 0.0 })
                .fold(0.0, f64::max)
        };
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| score(x.1).total_cmp(&score(y.1)))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = &segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        let too_narrow = (seg.b - seg.a).abs() <= 1e3 * f64::EPSILON * (seg.a.abs() + seg.b.abs()).max(f64::MIN_POSITIVE)
            || mid <= seg.a
            || mid >= seg.b;
        if segments.len() >= opts.max_subdivisions || too_narrow {
            let r = results();
            return Err(CasimirError::QuadratureNotConverged {
                value: r[0].value,
                error_estimate: r[0].error_estimate,
                evaluations,
            });
        }
        let (sa, sb) = (seg.a, seg.b);
        let halves = evaluate_segments(g, dim, &[(sa, mid), (mid, sb)], opts.parallel)?;
        evaluations += 42;
        segments.swap_remove(worst);
        segments.extend(halves);
        // Keep the reduction order independent of refinement history.
        segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    }
}

/// Vector integral over a finite interval.
pub fn integrate_interval_vec<F>(f: F, dim: usize, a: f64, b: f64, opts: &QuadratureOptions) -> Result<Vec<QuadratureResult>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(crate::error::domain("integrate_interval", "bounds must be finite"));
    }
    adaptive(&f, dim, a, b, opts)
}

/// Scalar integral over a finite interval.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let g = |x: f64| f(x).map(|v| vec![v]);
    integrate_interval_vec(g, 1, a, b, opts).map(|mut r| r.remove(0))
}

/// Vector integral over `[lower, ∞)`.
pub fn integrate_semiinfinite_vec<F>(f: F, dim: usize, lower: f64, opts: &QuadratureOptions) -> Result<Vec<QuadratureResult>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    if !lower.is_finite() {
        return Err(crate::error::domain("integrate_semiinfinite", "lower bound must be finite"));
    }
    if !(opts.scale.is_finite() && opts.scale > 0.0) {
        return Err(crate::error::invalid("scale", format!("must be positive, got {}", opts.scale)));
    }
    let s = opts.scale;
    let g = |t: f64| -> Result<Vec<f64>> {
        let one_minus = 1.0 - t;
        let x = lower + s * t / one_minus;
        let jac = s / (one_minus * one_minus);
        let mut v = f(x)?;
        for y in v.iter_mut() {
            // exponentially decayed integrands underflow to zero before the Jacobian blows up
            *y = if *y == 0.0 { 0.0 } else { *y * jac };
        }
        Ok(v)
    };
    adaptive(&g, dim, 0.0, 1.0, opts)
}

/// Scalar integral over `[lower, ∞)` with fallible integrand.
pub fn integrate_semiinfinite_with<F>(f: F, lower: f64, opts: &QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let g = |x: f64| f(x).map(|v| vec![v]);
    integrate_semiinfinite_vec(g, 1, lower, opts).map(|mut r| r.remove(0))
}

/// `∫₀^∞ f(κ) dκ` to relative tolerance `tol`.
pub fn integrate_semiinfinite<F>(f: F, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_semiinfinite_with(|x| Ok(f(x)), 0.0, &QuadratureOptions::with_tol(tol))
}
