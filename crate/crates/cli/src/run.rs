//! Dispatch of a validated configuration to the physics library.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use casimir_core::edges::{halfplane_perp_energy, strip_energy_per_length, HalfPlaneConfig, StripConfig};
use casimir_core::lifshitz::{plate_energy, PlateConfig};
use casimir_core::pfa_gradient::{
    beta_table, gradient_correction_factor, gradient_corrected_two_spheres, gradient_expansion_energy,
    paraboloid_patch_radius, pfa_two_spheres, BoundaryKind, GradientEnergy, SurfaceProfile, TwoSphereConfig,
};
use casimir_core::scattering::{
    casimir_polder_quadrature, tgtg_energy_mixed, tgtg_energy_sphere_plate, DipolePair, EnergyResult,
};
use casimir_core::thermal::{thermal_sweep, ThermalSweep};
use casimir_core::CasimirError;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{bc_name, Job, RunConfig, Shape, Subcommand};
use crate::output::{columns, num, Report, Row, Warning, WarningKind};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{subcommand}: {source}")]
    Physics {
        subcommand: Subcommand,
        #[source]
        source: CasimirError,
    },
    #[error("{subcommand}: {path}: {message}")]
    Profile {
        subcommand: Subcommand,
        path: PathBuf,
        message: String,
    },
    #[error("{subcommand}: {message}")]
    Unsupported { subcommand: Subcommand, message: String },
}

/// Grid points per side of the paraboloid used for mixed sphere-plate pairs.
const PARABOLOID_GRID: usize = 801;
/// Largest slope of the paraboloid patch; beyond it the surface is flat.
const PARABOLOID_MAX_SLOPE: f64 = 0.29;

struct Ctx {
    sub: Subcommand,
    rows: Vec<Row>,
    warnings: Vec<Warning>,
}

impl Ctx {
    fn warn(&mut self, kind: WarningKind, message: impl Into<String>) {
        self.warnings.push(Warning {
            kind,
            row: Some(self.rows.len()),
            message: message.into(),
        });
    }

    fn physics<T>(&self, r: casimir_core::Result<T>) -> Result<T, RunError> {
        r.map_err(|source| RunError::Physics {
            subcommand: self.sub,
            source,
        })
    }

    /// Orders the frozen columns first; every column is present, `null` if unset.
    fn push(&mut self, fields: Vec<(&str, Value)>) {
        let mut row = Row::new();
        for c in columns(self.sub) {
            row.insert((*c).to_string(), Value::Null);
        }
        for (k, v) in fields {
            row.insert(k.to_string(), v);
        }
        self.rows.push(row);
    }
}

/// Rounding-level error of a closed-form expression.
fn closed_form_error(e: f64) -> f64 {
    8.0 * f64::EPSILON * e.abs()
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    let start = Instant::now();
    let mut ctx = Ctx {
        sub: config.job.subcommand(),
        rows: Vec::new(),
        warnings: Vec::new(),
    };
    let units = config.settings.units;
    let tol = config.settings.tol;
    match &config.job {
        Job::Plates {
            a,
            temperature,
            material_1,
            material_2,
        } => {
            let (m1, m2) = (units.material(*material_1), units.material(*material_2));
            let t = units.temperature_in(*temperature);
            let b = ctx.physics(plate_energy(&PlateConfig::new(*a, m1, m2, t).with_tol(tol)))?;
            let e = |x: f64| num(units.energy_out(x));
            ctx.push(vec![
                ("a", num(*a)),
                ("T", num(*temperature)),
                ("total", e(b.total)),
                ("te", e(b.te)),
                ("tm", e(b.tm)),
                ("zero_mode", e(b.zero_mode)),
                ("error_estimate", e(b.error_estimate)),
                ("model_1", json!(material_1.compact())),
                ("model_2", json!(material_2.compact())),
                ("zero_mode_te", e(b.zero_mode_te)),
                ("matsubara_terms", json!(b.matsubara_terms)),
                ("evaluations", json!(b.evaluations)),
            ]);
        }
        Job::ThermalSweep {
            separations,
            temperatures,
            material_1,
            material_2,
        } => {
            let (m1, m2) = (units.material(*material_1), units.material(*material_2));
            let ts: Vec<f64> = temperatures.iter().map(|&t| units.temperature_in(t)).collect();
            let sweep = ThermalSweep::new(separations.clone(), ts, m1, m2).with_tol(tol);
            let points = ctx.physics(thermal_sweep(&sweep))?;
            let t_user: Vec<f64> = separations.iter().flat_map(|_| temperatures.iter().copied()).collect();
            for (p, t) in points.iter().zip(t_user) {
                let e = |x: f64| num(units.energy_out(x));
                let check = p.zero_mode_check.map(|c| {
                    json!({
                        "difference": e(c.difference),
                        "expected": e(c.expected),
                        "ideal_limit": e(c.ideal),
                        "budget": e(c.budget),
                        "within_budget": c.within_budget,
                    })
                });
                if let Some(c) = p.zero_mode_check.filter(|c| !c.within_budget) {
                    ctx.warn(
                        WarningKind::Convergence,
                        format!(
                            "Drude minus plasma {:e} differs from the missing TE zero mode {:e} beyond {:e}",
                            c.difference, c.expected, c.budget
                        ),
                    );
                }
                ctx.push(vec![
                    ("a", num(p.a)),
                    ("T", num(t)),
                    ("F_per_A", e(p.free_energy)),
                    ("S_per_A", num(units.entropy_out(p.entropy))),
                    ("zero_mode_share", e(p.zero_mode_share)),
                    ("model_1", json!(material_1.compact())),
                    ("model_2", json!(material_2.compact())),
                    ("error_estimate", e(p.error_estimate)),
                    ("zero_mode_check", check.unwrap_or(Value::Null)),
                    ("error", p.error.clone().map_or(Value::Null, Value::String)),
                ]);
            }
        }
        Job::Pfa { kind, shape } => proximity(&mut ctx, *kind, shape, false, units)?,
        Job::Gradient { kind, shape } => proximity(&mut ctx, *kind, shape, true, units)?,
        Job::Spheres {
            r1,
            r2,
            d,
            bc_1,
            bc_2,
            l_max,
        } => {
            let r = ctx.physics(tgtg_energy_mixed(*r1, *bc_1, *r2, *bc_2, r1 + r2 + d, *l_max, tol))?;
            let mut fields = vec![
                ("R1", num(*r1)),
                ("R2", num(*r2)),
                ("d", num(*d)),
                ("bc_1", json!(bc_name(*bc_1))),
                ("bc_2", json!(bc_name(*bc_2))),
            ];
            fields.extend(scattering_fields(&r, units));
            scattering_warning(&mut ctx, &r);
            ctx.push(fields);
        }
        Job::SpherePlate {
            r,
            d,
            bc_sphere,
            bc_plate,
            l_max,
        } => {
            let e = ctx.physics(tgtg_energy_sphere_plate(*r, *d, *bc_sphere, *bc_plate, *l_max, tol))?;
            let mut fields = vec![
                ("R", num(*r)),
                ("d", num(*d)),
                ("bc_sphere", json!(bc_name(*bc_sphere))),
                ("bc_plate", json!(bc_name(*bc_plate))),
            ];
            fields.extend(scattering_fields(&e, units));
            scattering_warning(&mut ctx, &e);
            ctx.push(fields);
        }
        Job::CasimirPolder { alpha1, alpha2, d } => {
            let pair = ctx.physics(DipolePair::new(*alpha1, *alpha2, *d))?;
            let q = ctx.physics(casimir_polder_quadrature(&pair))?;
            if pair.outside_validity() {
                ctx.warn(
                    WarningKind::Validity,
                    "a polarisability exceeds 0.01 d³; the dipole approximation is unreliable",
                );
            }
            let rel = q.integral.error_estimate / q.integral.value;
            ctx.push(vec![
                ("alpha1", num(*alpha1)),
                ("alpha2", num(*alpha2)),
                ("d", num(*d)),
                ("energy", num(units.energy_out(q.energy))),
                (
                    "error_estimate",
                    num(units.energy_out(rel * q.energy.abs() + closed_form_error(q.energy))),
                ),
                ("integral", num(q.integral.value)),
                ("evaluations", json!(q.integral.evaluations)),
            ]);
        }
        Job::Strip { d, h, beta, gamma } => {
            let cfg = StripConfig::new(*d, *h).with_constants(*beta, *gamma);
            let e = ctx.physics(strip_energy_per_length(&cfg))?;
            if cfg.outside_validity() {
                ctx.warn(WarningKind::Validity, "strip narrower than its height; the edge expansion degrades");
            }
            ctx.push(vec![
                ("d", num(*d)),
                ("H", num(*h)),
                ("beta", num(*beta)),
                ("gamma", num(*gamma)),
                ("E_per_L", num(units.energy_out(e))),
                ("error_estimate", num(units.energy_out(closed_form_error(e)))),
            ]);
        }
        Job::HalfPlane { h, nu_max } => {
            let r = ctx.physics(halfplane_perp_energy(
                &HalfPlaneConfig::new(*h).with_nu_max(*nu_max).with_tol(tol),
            ))?;
            let rel = r.error_estimate / r.energy_per_length.abs();
            if rel > HALF_PLANE_TARGET {
                ctx.warn(
                    WarningKind::Convergence,
                    format!("relative error estimate {rel:.2e} above {HALF_PLANE_TARGET:e}; raise nu_max"),
                );
            }
            let e = |x: f64| num(units.energy_out(x));
            ctx.push(vec![
                ("H", num(*h)),
                ("nu_max", json!(r.nu_max)),
                ("E_per_L", e(r.energy_per_length)),
                ("C_perp", num(r.c_perp)),
                ("error_estimate", e(r.error_estimate)),
                ("C_perp_raw", num(r.c_perp_raw)),
                ("C_perp_lower", num(r.c_perp_lower)),
                ("extrapolation_spread", num(r.extrapolation_spread)),
                ("cutoff_sensitivity", num(r.cutoff_sensitivity)),
                ("quadrature_error", e(r.quadrature_error)),
                ("evaluations", json!(r.evaluations)),
            ]);
        }
    }
    Ok(Report {
        config: config.clone(),
        rows: ctx.rows,
        warnings: ctx.warnings,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Relative accuracy below which the half-plane energy counts as converged.
/// The error estimate is the full extrapolation step, well above the actual error.
const HALF_PLANE_TARGET: f64 = 1e-2;

fn scattering_fields(r: &EnergyResult, units: crate::config::Units) -> Vec<(&'static str, Value)> {
    let e = |x: f64| num(units.energy_out(x));
    let levels: Vec<Value> = r
        .levels
        .iter()
        .map(|&(l, v)| json!({"l_max": l, "energy": e(v)}))
        .collect();
    vec![
        ("energy", e(r.value)),
        ("error_estimate", e(r.error_estimate)),
        ("l_max", json!(r.l_max)),
        ("energy_raw", e(r.raw)),
        ("quadrature_error", e(r.quadrature_error)),
        ("truncation_error", e(r.truncation_error)),
        ("levels", Value::Array(levels)),
        ("evaluations", json!(r.evaluations)),
    ]
}

fn scattering_warning(ctx: &mut Ctx, r: &EnergyResult) {
    if let Some(w) = &r.warning {
        ctx.warn(WarningKind::Convergence, w.clone());
    }
}

fn kind_name(kind: BoundaryKind) -> String {
    format!("{kind:?}")
}

fn proximity(
    ctx: &mut Ctx,
    kind: BoundaryKind,
    shape: &Shape,
    gradient: bool,
    units: crate::config::Units,
) -> Result<(), RunError> {
    let e = |x: f64| num(units.energy_out(x));
    match shape {
        Shape::Spheres { r1, r2, d } => {
            let cfg = TwoSphereConfig {
                r1: *r1,
                r2: *r2,
                d: *d,
                kind,
            };
            let pfa = ctx.physics(pfa_two_spheres(&cfg))?;
            let mut extras = Vec::new();
            let (energy, error, method) = if !gradient {
                (pfa, closed_form_error(pfa), "closed form")
            } else if !kind.is_mixed() {
                let g = ctx.physics(gradient_corrected_two_spheres(&cfg))?;
                extras.push(("correction_factor", num(gradient_correction_factor(&cfg))));
                (g, closed_form_error(g), "closed form")
            } else if r2.is_infinite() {
                let (g, err) = mixed_sphere_plate(ctx, *r1, *d, kind)?;
                extras.push(("max_slope", num(g.max_slope)));
                extras.push(("coarsening_change", g.coarsening_change.map_or(Value::Null, num)));
                (g.energy, err, "paraboloid grid")
            } else {
                return Err(RunError::Unsupported {
                    subcommand: ctx.sub,
                    message: format!(
                        "{kind:?} needs profile grids for two finite spheres; the closed form covers identical boundaries and the sphere-plate case"
                    ),
                });
            };
            if cfg.outside_validity() {
                ctx.warn(
                    WarningKind::Validity,
                    format!("d/R above 0.2 for a body (d = {d}); the proximity expansion degrades"),
                );
            }
            let mut fields = vec![
                ("kind", json!(kind_name(kind))),
                ("R1", num(*r1)),
                ("R2", if r2.is_infinite() { json!("inf") } else { num(*r2) }),
                ("d", num(*d)),
                ("energy", e(energy)),
                ("energy_pfa", e(pfa)),
                ("error_estimate", e(error)),
                ("method", json!(method)),
            ];
            fields.extend(extras);
            ctx.push(fields);
        }
        Shape::Profiles { profile_1, profile_2 } => {
            let p1 = read_profile(ctx.sub, profile_1)?;
            let p2 = read_profile(ctx.sub, profile_2)?;
            let pair = if gradient {
                beta_table(kind)
            } else {
                beta_table(kind).without_gradients()
            };
            let g = ctx.physics(gradient_expansion_energy(&p1, &p2, &pair))?;
            grid_warnings(ctx, &g);
            let err = g.coarsening_change.unwrap_or(0.0) * g.energy.abs() + closed_form_error(g.energy);
            ctx.push(vec![
                ("kind", json!(kind_name(kind))),
                ("energy", e(g.energy)),
                ("energy_pfa", e(g.pfa)),
                ("error_estimate", e(err)),
                ("method", json!("profile grid")),
                ("max_slope", num(g.max_slope)),
                ("coarsening_change", g.coarsening_change.map_or(Value::Null, num)),
                ("grid", json!({"nx": p1.nx, "ny": p1.ny, "dx": p1.dx, "dy": p1.dy})),
            ]);
        }
    }
    Ok(())
}

fn grid_warnings(ctx: &mut Ctx, g: &GradientEnergy) {
    if g.slope_warning {
        ctx.warn(
            WarningKind::Validity,
            format!("surface slope {:.3} above 0.3; the derivative expansion degrades", g.max_slope),
        );
    }
    if g.grid_warning {
        ctx.warn(
            WarningKind::Convergence,
            format!(
                "energy changes by {:.2e} when the grid spacing doubles; refine the grid",
                g.coarsening_change.unwrap_or(f64::NAN)
            ),
        );
    }
}

/// Sphere below a flat plate, sampled as a paraboloid on a square grid.
///
/// Beyond the slope cap the sphere is flat at gap `H_c`; the collar is sized
/// so its area matches the PFA tail `2πR∫U dH` beyond `H_c`. The gradient
/// terms of that tail are not captured and enter the error estimate.
fn mixed_sphere_plate(ctx: &mut Ctx, r: f64, d: f64, kind: BoundaryKind) -> Result<(GradientEnergy, f64), RunError> {
    let rho = paraboloid_patch_radius(r, d).min(PARABOLOID_MAX_SLOPE * r);
    let h_c = d + rho * rho / (2.0 * r);
    let side = (PI * rho * rho + PI * r * h_c).sqrt();
    let n = PARABOLOID_GRID;
    let sphere = SurfaceProfile::from_fn(n, n, side, side, |x, y| -(x * x + y * y).min(rho * rho) / (2.0 * r));
    let sphere = ctx.physics(sphere)?;
    let plate = ctx.physics(SurfaceProfile::flat(n, n, side / n as f64, side / n as f64, d))?;
    let pair = beta_table(kind);
    let g = ctx.physics(gradient_expansion_energy(&sphere, &plate, &pair))?;
    grid_warnings(ctx, &g);
    let tail = pair.u(h_c).abs() * PI * r * h_c;
    let slope = rho / r;
    let beta_max = pair.beta_1.abs().max(pair.beta_2.abs());
    let err = g.coarsening_change.unwrap_or(0.0) * g.energy.abs() + tail * beta_max * slope * slope;
    Ok((g, err))
}

/// Heights on a uniform grid: a `dx,dy` header line, the two spacings, then
/// one comma-separated row of heights per line, all rows of equal length.
pub fn parse_profile(text: &str) -> Result<SurfaceProfile, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or("empty profile")?;
    let names: Vec<&str> = header.1.split(',').map(str::trim).collect();
    if names != ["dx", "dy"] {
        return Err(format!("line {}: expected the header `dx,dy`", header.0));
    }
    let (ln, spacing) = lines.next().ok_or("missing the dx,dy values")?;
    let sp = parse_row(ln, spacing)?;
    let [dx, dy] = sp[..] else {
        return Err(format!("line {ln}: expected two spacings"));
    };
    let mut heights = Vec::new();
    let mut nx = 0;
    let mut ny = 0;
    for (ln, line) in lines {
        let row = parse_row(ln, line)?;
        if ny == 0 {
            nx = row.len();
        } else if row.len() != nx {
            return Err(format!("line {ln}: {} heights, expected {nx}", row.len()));
        }
        heights.extend(row);
        ny += 1;
    }
    SurfaceProfile::new(nx, ny, dx, dy, heights).map_err(|e| e.to_string())
}

fn parse_row(ln: usize, line: &str) -> Result<Vec<f64>, String> {
    line.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("line {ln}: `{}` is not a finite number", s.trim()))
        })
        .collect()
}

fn read_profile(sub: Subcommand, path: &Path) -> Result<SurfaceProfile, RunError> {
    let fail = |message: String| RunError::Profile {
        subcommand: sub,
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
    parse_profile(&text).map_err(fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_csv() {
        let p = parse_profile("dx,dy\n0.5,0.25\n1,2,3\n4,5,6\n").unwrap();
        assert_eq!((p.nx, p.ny, p.dx, p.dy), (3, 2, 0.5, 0.25));
        assert_eq!(p.heights, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!(parse_profile("dx,dy\n0.5,0.25\n1,2,3\n4,5\n").unwrap_err().contains("line 4"));
        assert!(parse_profile("x,y\n1,1\n").is_err());
    }
}
