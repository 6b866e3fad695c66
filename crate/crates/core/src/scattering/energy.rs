use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::translation::{scaled_kernel_block, GauntTable, KernelSeries, MAX_L};
use super::{ScalarBc, ScalarSphereT};
use crate::error::{invalid, CasimirError, Result};
use crate::numerics::{integrate_semiinfinite_vec, log_det_one_minus_minors, BesselSequence, QuadratureOptions};

/// Smallest `d/R` accepted when `l_max` is left to the default rule.
pub const MIN_GAP_RATIO_DEFAULT: f64 = 0.02;

/// Beyond this value of `κ·gap` every round-trip entry underflows.
const KAPPA_GAP_CUTOFF: f64 = 400.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    /// Truncation-extrapolated energy.
    pub value: f64,
    /// Energy at the requested `l_max`.
    pub raw: f64,
    pub error_estimate: f64,
    pub quadrature_error: f64,
    pub truncation_error: f64,
    pub l_max: usize,
    /// `(l, E(l))` for every truncation evaluated alongside `l_max`.
    pub levels: Vec<(usize, f64)>,
    pub evaluations: usize,
    pub warning: Option<String>,
}

/// One azimuthal block of the round-trip operator, in a symmetrised form
/// with the same spectrum as `T₁U₁₂T₂U₂₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripBlock {
    pub m: usize,
    pub l_max: usize,
    pub kappa: f64,
    /// `+1` when the two scatterers have T-matrices of equal sign.
    pub sign: f64,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Setup {
    Spheres {
        r1: f64,
        bc1: ScalarBc,
        r2: f64,
        bc2: ScalarBc,
        d: f64,
    },
    /// Sphere of radius `r` whose centre sits `centre` above the plane.
    Plate {
        r: f64,
        bc_sphere: ScalarBc,
        bc_plate: ScalarBc,
        centre: f64,
    },
}

impl Setup {
    fn gap(&self) -> f64 {
        match *self {
            Self::Spheres { r1, r2, d, .. } => d - r1 - r2,
            Self::Plate { r, centre, .. } => centre - r,
        }
    }

    fn sign(&self) -> f64 {
        match *self {
            Self::Spheres { bc1, bc2, .. } => bc1.t_sign() * bc2.t_sign(),
            Self::Plate { bc_sphere, bc_plate, .. } => -bc_plate.plane_reflection() * bc_sphere.t_sign(),
        }
    }

    fn kernel_distance(&self) -> f64 {
        match *self {
            Self::Spheres { d, .. } => d,
            Self::Plate { centre, .. } => 2.0 * centre,
        }
    }

    /// Matrix whose leading minors give `det(1 − N^m)` for every truncation,
    /// and the minor size belonging to truncation `l`.
    fn minor_size(&self, l: usize, m: usize) -> usize {
        match self {
            Self::Spheres { .. } => 2 * (l - m + 1),
            Self::Plate { .. } => l - m + 1,
        }
    }
}

/// Per-`κ` data shared by all azimuthal blocks.
struct Frame {
    half_1: Vec<f64>,
    half_2: Vec<f64>,
    kernel: KernelSeries,
}

impl Frame {
    fn new(setup: &Setup, kappa: f64, l_max: usize) -> Result<Self> {
        let half = |r: f64, bc: ScalarBc| -> Result<Vec<f64>> {
            let seq = BesselSequence::new(l_max, kappa * r)?;
            Ok(ScalarSphereT::from_sequence(r, bc, kappa, &seq)
                .ln_abs
                .iter()
                .map(|v| 0.5 * v)
                .collect())
        };
        let (half_1, half_2) = match *setup {
            Setup::Spheres { r1, bc1, r2, bc2, .. } => (half(r1, bc1)?, half(r2, bc2)?),
            Setup::Plate { r, bc_sphere, .. } => {
                let h = half(r, bc_sphere)?;
                (h.clone(), h)
            }
        };
        let kernel = KernelSeries::new(l_max, kappa * setup.kernel_distance())?;
        Ok(Self { half_1, half_2, kernel })
    }

    /// `X` for spheres, `Ñ` for the plate.
    fn core_block(&self, setup: &Setup, table: &GauntTable, m: usize, l_max: usize) -> DMatrix<f64> {
        match setup {
            Setup::Spheres { .. } => scaled_kernel_block(table, m, l_max, &self.kernel, &self.half_1, &self.half_2, false),
            Setup::Plate { .. } => {
                let mut b = scaled_kernel_block(table, m, l_max, &self.kernel, &self.half_1, &self.half_2, true);
                b *= setup.sign();
                b
            }
        }
    }

    fn determinant_input(&self, setup: &Setup, table: &GauntTable, m: usize, l_max: usize) -> DMatrix<f64> {
        let x = self.core_block(setup, table, m, l_max);
        match setup {
            Setup::Plate { .. } => x,
            Setup::Spheres { .. } => {
                // Interleave the two spheres by order so leading minors are truncations:
                // det(1 − [[0, X], [σXᵀ, 0]]) = det(1 − σXXᵀ).
                let n = x.nrows();
                let s = setup.sign();
                let mut a = DMatrix::zeros(2 * n, 2 * n);
                for i in 0..n {
                    for j in 0..n {
                        a[(2 * i, 2 * j + 1)] = x[(i, j)];
                        a[(2 * i + 1, 2 * j)] = s * x[(j, i)];
                    }
                }
                a
            }
        }
    }
}

fn integrand(setup: &Setup, table: &GauntTable, kappa: f64, l_max: usize, levels: &[usize], tol: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; levels.len()];
    if kappa * setup.gap() > KAPPA_GAP_CUTOFF {
        return Ok(out);
    }
    let frame = Frame::new(setup, kappa, l_max)?;
    let top = levels.len() - 1;
    for m in 0..=l_max {
        let minors = log_det_one_minus_minors(&frame.determinant_input(setup, table, m, l_max)).map_err(|e| match e {
            CasimirError::NotContraction(s) => {
                CasimirError::NotContraction(format!("round trip at κ = {kappa}, m = {m}: {s}"))
            }
            other => other,
        })?;
        let w = if m == 0 { 1.0 } else { 2.0 };
        for (slot, &l) in out.iter_mut().zip(levels) {
            if l >= m {
                *slot += w * minors[setup.minor_size(l, m) - 1];
            }
        }
        let contribution = w * minors[setup.minor_size(l_max, m) - 1];
        if contribution == 0.0 || (m > 0 && contribution.abs() <= 0.1 * tol * out[top].abs()) {
            break;
        }
    }
    for v in out.iter_mut() {
        *v /= 2.0 * PI;
    }
    Ok(out)
}

fn levels_for(l_max: usize) -> Vec<usize> {
    [4usize, 2, 0].iter().filter(|&&k| k <= l_max).map(|k| l_max - k).collect()
}

/// Aitken extrapolation over `l_max − 4, l_max − 2, l_max`; falls back to
/// the top level when the sequence is not geometrically convergent.
fn extrapolate(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let top = values[n - 1];
    if n < 2 {
        return (top, f64::NAN);
    }
    let d2 = top - values[n - 2];
    if n >= 3 {
        let d1 = values[n - 2] - values[n - 3];
        if d1 != 0.0 {
            let rho = d2 / d1;
            if rho > 0.0 && rho < 0.9 {
                let extra = d2 * rho / (1.0 - rho);
                return (top + extra, extra.abs());
            }
        }
    }
    (top, d2.abs())
}

fn solve(setup: Setup, l_max: usize, tol: f64) -> Result<EnergyResult> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
    }
    let table = GauntTable::new(l_max)?;
    let levels = levels_for(l_max);
    let opts = QuadratureOptions::with_tol(tol)
        .scale(0.5 / setup.gap())
        .abs_tol(1e-300)
        .parallel(true);
    let r = integrate_semiinfinite_vec(
        |k| integrand(&setup, &table, k, l_max, &levels, tol),
        levels.len(),
        0.0,
        &opts,
    )?;
    let values: Vec<f64> = r.iter().map(|q| q.value).collect();
    let (value, truncation_error) = extrapolate(&values);
    let top = r.last().expect("at least one level");
    let truncation_error = if truncation_error.is_nan() { 0.0 } else { truncation_error };
    let warning = if levels.len() < 2 {
        Some(format!("l_max = {l_max} too small to estimate the truncation error"))
    } else if truncation_error > 10.0 * tol * value.abs() {
        Some(format!(
            "truncation error {truncation_error:.3e} exceeds 10·tol·|E|; raise l_max above {l_max}"
        ))
    } else {
        None
    };
    Ok(EnergyResult {
        value,
        raw: top.value,
        error_estimate: top.error_estimate + truncation_error,
        quadrature_error: top.error_estimate,
        truncation_error,
        l_max,
        levels: levels.iter().copied().zip(values).collect(),
        evaluations: top.evaluations,
        warning,
    })
}

fn default_l_max(ratio: f64) -> usize {
    ((8.0 + 4.0 / ratio).ceil() as usize).min(MAX_L)
}

/// Default truncation for a sphere of radius `r` at surface gap `d_gap` from a plane.
pub fn default_l_max_sphere_plate(r: f64, d_gap: f64) -> usize {
    default_l_max(d_gap / r)
}

/// Default truncation for two spheres at surface gap `d_gap`.
pub fn default_l_max_spheres(r1: f64, r2: f64, d_gap: f64) -> usize {
    default_l_max(d_gap / r1.max(r2))
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(name, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

fn resolve_l_max(l_max: Option<usize>, ratio: f64) -> Result<usize> {
    match l_max {
        Some(l) => Ok(l),
        None if ratio < MIN_GAP_RATIO_DEFAULT => Err(invalid(
            "d_gap",
            format!(
                "d/R = {ratio:.4} is below {MIN_GAP_RATIO_DEFAULT} for the default truncation; pass an explicit l_max of order 4R/d or more"
            ),
        )),
        None => Ok(default_l_max(ratio)),
    }
}

/// Two spheres with independent boundary conditions, centres `d_cc` apart.
pub fn tgtg_energy_mixed(
    r1: f64,
    bc1: ScalarBc,
    r2: f64,
    bc2: ScalarBc,
    d_cc: f64,
    l_max: Option<usize>,
    tol: f64,
) -> Result<EnergyResult> {
    check_positive("R1", r1)?;
    check_positive("R2", r2)?;
    check_positive("d_cc", d_cc)?;
    if d_cc <= r1 + r2 {
        return Err(CasimirError::NotContraction(format!(
            "spheres overlap: d_cc = {d_cc} ≤ R1 + R2 = {}",
            r1 + r2
        )));
    }
    let gap = d_cc - r1 - r2;
    let l = resolve_l_max(l_max, gap / r1.max(r2))?;
    solve(
        Setup::Spheres {
            r1,
            bc1,
            r2,
            bc2,
            d: d_cc,
        },
        l,
        tol,
    )
}

/// Two spheres with the same boundary condition. `R2 = ∞` selects the
/// sphere–plate geometry with `d_cc` the centre-to-plane distance.
pub fn tgtg_energy_scalar(
    r1: f64,
    r2: f64,
    d_cc: f64,
    bc: ScalarBc,
    l_max: Option<usize>,
    tol: f64,
) -> Result<EnergyResult> {
    if r2 == f64::INFINITY {
        check_positive("R1", r1)?;
        return tgtg_energy_sphere_plate(r1, d_cc - r1, bc, bc, l_max, tol);
    }
    tgtg_energy_mixed(r1, bc, r2, bc, d_cc, l_max, tol)
}

/// Sphere of radius `r` at surface gap `d_gap` from an infinite plane.
pub fn tgtg_energy_sphere_plate(
    r: f64,
    d_gap: f64,
    bc_sphere: ScalarBc,
    bc_plate: ScalarBc,
    l_max: Option<usize>,
    tol: f64,
) -> Result<EnergyResult> {
    check_positive("R", r)?;
    if !(d_gap > 0.0) || !d_gap.is_finite() {
        return Err(CasimirError::NotContraction(format!(
            "sphere touches or crosses the plane: d_gap = {d_gap}"
        )));
    }
    let l = resolve_l_max(l_max, d_gap / r)?;
    solve(
        Setup::Plate {
            r,
            bc_sphere,
            bc_plate,
            centre: r + d_gap,
        },
        l,
        tol,
    )
}

fn block(setup: Setup, kappa: f64, m: usize, l_max: usize) -> Result<RoundTripBlock> {
    if m > l_max {
        return Err(invalid("m", format!("must not exceed l_max = {l_max}, got {m}")));
    }
    check_positive("kappa", kappa)?;
    let table = GauntTable::new(l_max)?;
    let frame = Frame::new(&setup, kappa, l_max)?;
    let x = frame.core_block(&setup, &table, m, l_max);
    let matrix = match setup {
        Setup::Spheres { .. } => &x * x.transpose() * setup.sign(),
        Setup::Plate { .. } => x,
    };
    Ok(RoundTripBlock {
        m,
        l_max,
        kappa,
        sign: setup.sign(),
        matrix,
    })
}

/// `σ X Xᵀ` with `X = |T₁|^½ G |T₂|^½`, similar to the sphere–sphere round trip.
pub fn round_trip_block_spheres(
    r1: f64,
    bc1: ScalarBc,
    r2: f64,
    bc2: ScalarBc,
    d_cc: f64,
    kappa: f64,
    m: usize,
    l_max: usize,
) -> Result<RoundTripBlock> {
    check_positive("R1", r1)?;
    check_positive("R2", r2)?;
    if !(d_cc > r1 + r2) {
        return Err(CasimirError::NotContraction(format!("spheres overlap: d_cc = {d_cc}")));
    }
    block(
        Setup::Spheres {
            r1,
            bc1,
            r2,
            bc2,
            d: d_cc,
        },
        kappa,
        m,
        l_max,
    )
}

/// Symmetrised sphere–plate round trip through the mirror image.
pub fn round_trip_block_sphere_plate(
    r: f64,
    d_gap: f64,
    bc_sphere: ScalarBc,
    bc_plate: ScalarBc,
    kappa: f64,
    m: usize,
    l_max: usize,
) -> Result<RoundTripBlock> {
    check_positive("R", r)?;
    check_positive("d_gap", d_gap)?;
    block(
        Setup::Plate {
            r,
            bc_sphere,
            bc_plate,
            centre: r + d_gap,
        },
        kappa,
        m,
        l_max,
    )
}
