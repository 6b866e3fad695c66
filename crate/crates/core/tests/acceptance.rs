//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p casimir-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use casimir_core::edges::{halfplane_perp_energy, HalfPlaneConfig};
use casimir_core::lifshitz::{plate_energy_t0, plate_free_energy, PlateConfig};
use casimir_core::materials::DielectricModel;
use casimir_core::pfa_gradient::{
    beta_em, beta_n, beta_nd, beta_table, pfa_two_spheres, BoundaryKind, TwoSphereConfig, BETA_D, BETA_DN,
};
use casimir_core::scattering::{
    casimir_polder_quadrature, default_l_max_sphere_plate, tgtg_energy_sphere_plate, DipolePair, ScalarBc,
};
use casimir_core::thermal::ZETA3;
use nalgebra::{DMatrix, DVector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run<F>(id: u32, name: &str, budget: Duration, f: F) -> bool
where
    F: FnOnce() -> Outcome,
{
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    let timing = if in_time {
        format!("{:.2?}", elapsed)
    } else {
        format!("{:.2?}, over the {:?} budget", elapsed, budget)
    };
    println!(
        "{} {id}. {name}: {} ({timing})",
        if pass { "PASS" } else { "FAIL" },
        out.detail
    );
    pass
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ideal_plates() -> Outcome {
    let pec = DielectricModel::PerfectConductor;
    let e = plate_energy_t0(&PlateConfig::new(1.0, pec, pec, 0.0)).map(|b| b.total);
    let exact = -PI * PI / 720.0;
    match e {
        Ok(v) => Outcome {
            pass: rel(v, exact) <= 1e-6,
            detail: format!("U a³ = {v:.10} vs {exact:.10}, rel {:.1e} (limit 1e-6)", rel(v, exact)),
        },
        Err(e) => fail(e),
    }
}

fn casimir_polder() -> Outcome {
    let q = DipolePair::new(1.0, 1.0, 1.0).and_then(|p| casimir_polder_quadrature(&p));
    match q {
        Ok(q) => {
            let exact = -23.0 / (4.0 * PI);
            let r = rel(q.energy, exact);
            let ri = rel(q.integral.value, 5.75);
            Outcome {
                pass: r <= 1e-10 && ri <= 1e-10,
                detail: format!(
                    "E = {:.12} vs −23/4π, rel {r:.1e}; integral {:.12}, rel {ri:.1e} (limit 1e-10)",
                    q.energy, q.integral.value
                ),
            }
        }
        Err(e) => fail(e),
    }
}

fn half_plane() -> Outcome {
    let mut c = Vec::new();
    for h in [0.5, 1.0, 2.0] {
        match halfplane_perp_energy(&HalfPlaneConfig::new(h).with_nu_max(12)) {
            Ok(r) => c.push((r.c_perp, -r.energy_per_length * h * h)),
            Err(e) => return fail(e),
        }
    }
    let (c0, _) = c[0];
    let spread = c.iter().map(|&(_, ch)| rel(ch, c0)).fold(0.0, f64::max);
    Outcome {
        pass: (c0 - 0.0067415).abs() <= 1e-4 && spread <= 1e-8,
        detail: format!(
            "C⊥ = {c0:.8} (target 0.0067415 ± 1e-4); −E H² spread over H ∈ {{0.5, 1, 2}} {spread:.1e} (limit 1e-8)"
        ),
    }
}

fn thermal_expansion() -> Outcome {
    let pec = DielectricModel::PerfectConductor;
    let ts: Vec<f64> = (0..9).map(|i| 0.02 + 0.01 * i as f64).collect();
    let f0 = -PI * PI / 720.0;
    let mut rhs = Vec::new();
    for &t in &ts {
        match plate_free_energy(&PlateConfig::new(1.0, pec, pec, t).with_tol(1e-12)) {
            Ok(b) => rhs.push(b.total - f0),
            Err(e) => return fail(e),
        }
    }
    let design = DMatrix::from_fn(ts.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => ts[i].powi(3),
        _ => ts[i].powi(4),
    });
    let svd = design.svd(true, true);
    let coef = match svd.solve(&DVector::from_vec(rhs), 1e-300) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let c3 = -ZETA3 / (2.0 * PI);
    let c4 = PI * PI / 45.0;
    let (r3, r4) = (rel(coef[1], c3), rel(coef[2], c4));
    Outcome {
        pass: r3 <= 0.02 && r4 <= 0.10,
        detail: format!(
            "c3 = {:.6} vs {c3:.6} (rel {r3:.1e}, limit 2%); c4 = {:.6} vs {c4:.6} (rel {r4:.1e}, limit 10%)",
            coef[1], coef[2]
        ),
    }
}

fn zero_mode() -> Outcome {
    let (a, t, wp) = (1.0, 10.0, 1e4);
    let drude = DielectricModel::Drude {
        omega_p: wp,
        gamma: 1e-8 * wp,
    };
    let plasma = DielectricModel::Plasma { omega_p: wp };
    let fd = plate_free_energy(&PlateConfig::new(a, drude, drude, t));
    let fp = plate_free_energy(&PlateConfig::new(a, plasma, plasma, t));
    match (fd, fp) {
        (Ok(d), Ok(p)) => {
            let diff = d.total - p.total;
            let expected = ZETA3 * t / (16.0 * PI * a * a);
            let r = rel(diff, expected);
            Outcome {
                pass: r <= 0.01,
                detail: format!("ΔF = {diff:.8} vs ζ(3)T/16πa² = {expected:.8}, rel {r:.1e} (limit 1%)"),
            }
        }
        (Err(e), _) | (_, Err(e)) => fail(e),
    }
}

fn sphere_plate_slope() -> Outcome {
    let ratios = [0.04, 0.06, 0.08, 0.10];
    let mut num = 0.0;
    let mut den = 0.0;
    let mut rows = Vec::new();
    for &x in &ratios {
        let e = match tgtg_energy_sphere_plate(1.0, x, ScalarBc::Dirichlet, ScalarBc::Dirichlet, None, 1e-8) {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        let pfa = match pfa_two_spheres(&TwoSphereConfig::sphere_plate(1.0, x, BoundaryKind::DD)) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let y = e.value / pfa - 1.0;
        num += x * y;
        den += x * x;
        rows.push(format!("d/R={x}: l_max {} ratio−1 {y:.5}", default_l_max_sphere_plate(1.0, x)));
    }
    let s = num / den;
    Outcome {
        pass: (s - 1.0 / 3.0).abs() <= 0.1 / 3.0,
        detail: format!("s = {s:.4} (target 1/3 ± 10%); {}", rows.join(", ")),
    }
}

fn attraction() -> Outcome {
    let sweeps = common::attraction::all();
    let bad: Vec<String> = sweeps
        .iter()
        .filter(|s| !s.passed())
        .map(|s| format!("{} ({} non-attractive)", s.geometry, s.failures.len()))
        .collect();
    let draws: usize = sweeps.iter().map(|s| s.draws).sum();
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} geometries, {draws} draws, all E < 0", sweeps.len())
        } else {
            bad.join("; ")
        },
    }
}

fn oracles() -> Outcome {
    let checks = [
        ("translation", common::translation_oracle_max_error(), 1e-8),
        ("Bessel", common::bessel_oracle_max_error(), 1e-12),
        ("log det", common::log_det_oracle_max_error(), 1e-10),
        ("Bateman", common::bateman_oracle_max_error(), 1e-9),
    ];
    Outcome {
        pass: checks.iter().all(|&(_, e, tol)| e <= tol),
        detail: checks
            .iter()
            .map(|(n, e, tol)| format!("{n} {e:.1e} (limit {tol:.0e})"))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn beta_exactness() -> Outcome {
    let pi2 = PI * PI;
    let expected = [
        ("β_D", BETA_D, 2.0 / 3.0),
        ("β_N", beta_n(), 2.0 / 3.0 * (1.0 - 30.0 / pi2)),
        ("β_DN", BETA_DN, 2.0 / 3.0),
        ("β_ND", beta_nd(), 2.0 / 3.0 - 80.0 / (7.0 * pi2)),
        ("β_EM", beta_em(), 2.0 / 3.0 * (1.0 - 15.0 / pi2)),
    ];
    let mut worst: f64 = 0.0;
    for (_, got, want) in expected {
        worst = worst.max((got - want).abs() / want.abs());
    }
    let mut table_ok = true;
    for kind in BoundaryKind::ALL {
        let p = beta_table(kind);
        let cross = (p.beta_cross - (2.0 - p.beta_1 - p.beta_2)).abs();
        table_ok &= cross <= f64::EPSILON * 2.0 && p.beta_minus == 0.0;
    }
    let nd = beta_table(BoundaryKind::ND);
    table_ok &= nd.beta_1 == BETA_DN && nd.beta_2 == beta_nd();
    Outcome {
        pass: worst <= f64::EPSILON && table_ok,
        detail: format!(
            "worst relative deviation {worst:.1e} (limit ε); β_× = 2 − β₁ − β₂ and β_− = 0 for all kinds: {table_ok}"
        ),
    }
}

fn fail(e: impl std::fmt::Display) -> Outcome {
    Outcome {
        pass: false,
        detail: format!("error: {e}"),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "ideal plates", secs(1), ideal_plates),
        run(2, "Casimir-Polder", secs(1), casimir_polder),
        run(3, "half-plane constant", secs(300), half_plane),
        run(4, "thermal plasma expansion", secs(120), thermal_expansion),
        run(5, "Drude zero-mode deficit", secs(120), zero_mode),
        run(6, "sphere-plate gradient slope", secs(1800), sphere_plate_slope),
        run(7, "attraction", secs(600), attraction),
        run(8, "oracles", secs(120), oracles),
        run(9, "beta table", secs(1), beta_exactness),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
