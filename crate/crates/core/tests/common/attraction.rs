//! Seeded random draws of mirror-symmetric configurations for every geometry.

use casimir_core::edges::{halfplane_perp_energy, strip_energy_per_length, HalfPlaneConfig, StripConfig};
use casimir_core::lifshitz::{plate_energy, PlateConfig};
use casimir_core::materials::DielectricModel;
use casimir_core::pfa_gradient::{
    beta_table, gradient_corrected_two_spheres, gradient_expansion_energy, pfa_two_spheres, BoundaryKind,
    SurfaceProfile, TwoSphereConfig,
};
use casimir_core::scattering::{
    casimir_polder_quadrature, tgtg_energy_mixed, tgtg_energy_sphere_plate, DipolePair, ScalarBc,
};
use casimir_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DRAWS: usize = 50;

pub struct Sweep {
    pub geometry: &'static str,
    pub draws: usize,
    /// Draws that were not strictly attractive, with their parameters.
    pub failures: Vec<String>,
}

impl Sweep {
    pub fn passed(&self) -> bool {
        self.draws == DRAWS && self.failures.is_empty()
    }
}

fn sweep<F>(geometry: &'static str, seed: u64, mut draw: F) -> Sweep
where
    F: FnMut(&mut ChaCha8Rng) -> (String, Result<f64>),
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..DRAWS {
        let (params, e) = draw(&mut rng);
        match e {
            Ok(v) if v < 0.0 => {}
            Ok(v) => failures.push(format!("{params}: E = {v:e}")),
            Err(err) => failures.push(format!("{params}: {err}")),
        }
    }
    Sweep {
        geometry,
        draws: DRAWS,
        failures,
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn material(rng: &mut ChaCha8Rng) -> DielectricModel {
    match rng.gen_range(0..4) {
        0 => DielectricModel::PerfectConductor,
        1 => DielectricModel::Plasma {
            omega_p: log_uniform(rng, 0.1, 100.0),
        },
        2 => {
            let omega_p = log_uniform(rng, 0.1, 100.0);
            DielectricModel::Drude {
                omega_p,
                gamma: omega_p * log_uniform(rng, 1e-8, 1.0),
            }
        }
        _ => DielectricModel::Constant {
            eps: rng.gen_range(1.5..50.0),
        },
    }
}

fn symmetric_kind(rng: &mut ChaCha8Rng) -> BoundaryKind {
    [BoundaryKind::DD, BoundaryKind::NN, BoundaryKind::EM][rng.gen_range(0..3)]
}

fn scalar_bc(rng: &mut ChaCha8Rng) -> ScalarBc {
    if rng.gen_bool(0.5) {
        ScalarBc::Dirichlet
    } else {
        ScalarBc::Neumann
    }
}

pub fn plates_zero_temperature() -> Sweep {
    sweep("plates, T = 0", 11, |rng| {
        let m = material(rng);
        let a = log_uniform(rng, 0.1, 10.0);
        let e = plate_energy(&PlateConfig::new(a, m, m, 0.0).with_tol(1e-6)).map(|b| b.total);
        (format!("{m:?} a={a}"), e)
    })
}

pub fn plates_finite_temperature() -> Sweep {
    sweep("plates, T > 0", 12, |rng| {
        let m = material(rng);
        let a = log_uniform(rng, 0.1, 10.0);
        let t = log_uniform(rng, 0.05, 5.0) / a;
        let e = plate_energy(&PlateConfig::new(a, m, m, t).with_tol(1e-6)).map(|b| b.total);
        (format!("{m:?} a={a} T={t}"), e)
    })
}

pub fn proximity_spheres() -> Sweep {
    sweep("PFA and gradient-corrected spheres", 13, |rng| {
        let kind = symmetric_kind(rng);
        let r = log_uniform(rng, 0.1, 100.0);
        // The Neumann bracket changes sign near d/R = 0.13, beyond the expansion's reach.
        let d = r * log_uniform(rng, 1e-3, 0.05);
        let c = TwoSphereConfig { r1: r, r2: r, d, kind };
        let e = pfa_two_spheres(&c).and_then(|p| gradient_corrected_two_spheres(&c).map(|g| p.max(g)));
        (format!("{kind:?} R={r} d={d}"), e)
    })
}

pub fn gradient_surfaces() -> Sweep {
    sweep("derivative expansion, mirrored surfaces", 14, |rng| {
        let kind = symmetric_kind(rng);
        let h0 = log_uniform(rng, 0.1, 2.0);
        let k: f64 = rng.gen_range(0.2..2.0);
        let amp = rng.gen_range(0.0..1.0) * (0.25 / k).min(0.25 * h0);
        let l = 2.0 * std::f64::consts::PI / k;
        let g = move |x: f64, y: f64| amp * (k * x).sin() * (0.5 * k * y).cos();
        let e = SurfaceProfile::from_fn(48, 48, l, 2.0 * l, move |x, y| -g(x, y)).and_then(|p1| {
            let p2 = SurfaceProfile::from_fn(48, 48, l, 2.0 * l, move |x, y| h0 + g(x, y))?;
            gradient_expansion_energy(&p1, &p2, &beta_table(kind)).map(|r| r.energy)
        });
        (format!("{kind:?} H={h0} k={k} A={amp}"), e)
    })
}

pub fn tgtg_spheres() -> Sweep {
    sweep("scattering, two spheres", 15, |rng| {
        let bc = scalar_bc(rng);
        let r1 = log_uniform(rng, 0.2, 5.0);
        let r2 = log_uniform(rng, 0.2, 5.0);
        let gap = r1.min(r2) * log_uniform(rng, 0.5, 20.0);
        let e = tgtg_energy_mixed(r1, bc, r2, bc, r1 + r2 + gap, Some(8), 1e-6).map(|r| r.value);
        (format!("{bc:?} R1={r1} R2={r2} gap={gap}"), e)
    })
}

pub fn tgtg_sphere_plate() -> Sweep {
    sweep("scattering, sphere and plate", 16, |rng| {
        let bc = scalar_bc(rng);
        let r = log_uniform(rng, 0.2, 5.0);
        let gap = r * log_uniform(rng, 0.5, 20.0);
        let e = tgtg_energy_sphere_plate(r, gap, bc, bc, Some(8), 1e-6).map(|r| r.value);
        (format!("{bc:?} R={r} gap={gap}"), e)
    })
}

pub fn casimir_polder() -> Sweep {
    sweep("Casimir-Polder", 17, |rng| {
        let d = log_uniform(rng, 0.1, 100.0);
        let a1 = d.powi(3) * log_uniform(rng, 1e-6, 1e-2);
        let a2 = d.powi(3) * log_uniform(rng, 1e-6, 1e-2);
        let e = DipolePair::new(a1, a2, d).and_then(|p| casimir_polder_quadrature(&p)).map(|q| q.energy);
        (format!("α1={a1} α2={a2} d={d}"), e)
    })
}

pub fn half_plane() -> Sweep {
    sweep("half-plane above a plane", 18, |rng| {
        let h = log_uniform(rng, 0.01, 100.0);
        let nu = 2 * rng.gen_range(2..5);
        let e = halfplane_perp_energy(&HalfPlaneConfig::new(h).with_nu_max(nu).with_tol(1e-6))
            .map(|r| r.energy_per_length);
        (format!("H={h} nu_max={nu}"), e)
    })
}

pub fn strip() -> Sweep {
    sweep("strip above a plane", 19, |rng| {
        let h = log_uniform(rng, 0.01, 100.0);
        let half_width = h * log_uniform(rng, 0.5, 100.0);
        let e = strip_energy_per_length(&StripConfig::new(half_width, h));
        (format!("d={half_width} H={h}"), e)
    })
}

pub fn all() -> Vec<Sweep> {
    vec![
        plates_zero_temperature(),
        plates_finite_temperature(),
        proximity_spheres(),
        gradient_surfaces(),
        tgtg_spheres(),
        tgtg_sphere_plate(),
        casimir_polder(),
        half_plane(),
        strip(),
    ]
}
