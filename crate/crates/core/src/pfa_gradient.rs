//! Proximity force approximation and its derivative expansion.
//!
//! For two surfaces at heights `H₁(x)`, `H₂(x)` above a flat reference plane
//! the energy is
//!
//! ```text
//! E = ∫ d²x U(H) [1 + β₁ |∇H₁|² + β₂ |∇H₂|² + β_× ∇H₁·∇H₂],   H = H₂ − H₁
//! ```
//!
//! with `U(H) = −α π²/(1440 H³)` the parallel-plate energy per area.
//! Tilting the reference plane must leave `E` unchanged, which ties `β_×`
//! to `β₁`, `β₂` and `U`; the antisymmetric coefficient `β_−` vanishes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::numerics::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoundaryKind {
    /// Dirichlet scalar on both surfaces.
    DD,
    /// Neumann scalar on both surfaces.
    NN,
    /// Surface 1 Neumann, surface 2 Dirichlet.
    DN,
    /// Surface 1 Dirichlet, surface 2 Neumann.
    ND,
    /// Electromagnetic field, perfect conductors.
    EM,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 5] = [Self::DD, Self::NN, Self::DN, Self::ND, Self::EM];

    pub fn is_mixed(self) -> bool {
        matches!(self, Self::DN | Self::ND)
    }
}

impl std::str::FromStr for BoundaryKind {
    type Err = crate::CasimirError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DD" => Ok(Self::DD),
            "NN" => Ok(Self::NN),
            "DN" => Ok(Self::DN),
            "ND" => Ok(Self::ND),
            "EM" => Ok(Self::EM),
            other => Err(invalid("kind", format!("unknown boundary kind `{other}`"))),
        }
    }
}

/// Curved Dirichlet / flat Dirichlet, and the scalar D-D coefficient.
pub const BETA_D: f64 = 2.0 / 3.0;
pub const BETA_DN: f64 = 2.0 / 3.0;

/// `(2/3)(1 − 30/π²)`.
pub fn beta_n() -> f64 {
    2.0 / 3.0 * (1.0 - 30.0 / (PI * PI))
}

/// `2/3 − 80/(7π²)`, curved Neumann facing flat Dirichlet.
pub fn beta_nd() -> f64 {
    2.0 / 3.0 - 80.0 / (7.0 * PI * PI)
}

/// `(2/3)(1 − 15/π²)`.
pub fn beta_em() -> f64 {
    2.0 / 3.0 * (1.0 - 15.0 / (PI * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPair {
    pub kind: BoundaryKind,
    pub alpha: f64,
    pub beta_1: f64,
    pub beta_2: f64,
    pub beta_cross: f64,
    pub beta_minus: f64,
}

impl BoundaryPair {
    /// Plate energy per area at gap `h`.
    pub fn u(&self, h: f64) -> f64 {
        -self.alpha * PI * PI / (1440.0 * h * h * h)
    }

    /// Copy with every gradient coefficient set to zero (plain PFA).
    pub fn without_gradients(mut self) -> Self {
        self.beta_1 = 0.0;
        self.beta_2 = 0.0;
        self.beta_cross = 0.0;
        self
    }
}

/// Ideal-boundary coefficients. The mixed pair `ND` carries
/// `β₁ = β_DN`, `β₂ = β_ND`; `DN` is its mirror image.
pub fn beta_table(kind: BoundaryKind) -> BoundaryPair {
    let (alpha, b1, b2) = match kind {
        BoundaryKind::DD => (1.0, BETA_D, BETA_D),
        BoundaryKind::NN => (1.0, beta_n(), beta_n()),
        BoundaryKind::ND => (-7.0 / 8.0, BETA_DN, beta_nd()),
        BoundaryKind::DN => (-7.0 / 8.0, beta_nd(), BETA_DN),
        BoundaryKind::EM => (2.0, beta_em(), beta_em()),
    };
    BoundaryPair {
        kind,
        alpha,
        beta_1: b1,
        beta_2: b2,
        beta_cross: 2.0 - b1 - b2,
        beta_minus: 0.0,
    }
}

/// `β_× = [1 − H U'(H)/U(H)]/2 − β₁ − β₂` with a centred difference of
/// relative step `1e−6`.
pub fn beta_cross_general<U>(beta_1: f64, beta_2: f64, u: U, h: f64) -> Result<f64>
where
    U: Fn(f64) -> f64,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid("H", format!("must be positive, got {h}")));
    }
    let u0 = u(h);
    if u0 == 0.0 || !u0.is_finite() {
        return Err(domain("beta_cross_general", format!("U(H) = {u0} at H = {h}")));
    }
    let step = 1e-6 * h;
    let du = (u(h + step) - u(h - step)) / (2.0 * step);
    Ok(0.5 * (1.0 - h * du / u0) - beta_1 - beta_2)
}

/// Two spheres (or a sphere and a plane when `r2` is infinite).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSphereConfig {
    pub r1: f64,
    pub r2: f64,
    pub d: f64,
    pub kind: BoundaryKind,
}

impl TwoSphereConfig {
    pub fn sphere_plate(r: f64, d: f64, kind: BoundaryKind) -> Self {
        Self {
            r1: r,
            r2: f64::INFINITY,
            d,
            kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r1 > 0.0) || !self.r1.is_finite() {
            return Err(invalid("R1", format!("must be positive and finite, got {}", self.r1)));
        }
        if !(self.r2 > 0.0) || self.r2.is_nan() {
            return Err(invalid("R2", format!("must be positive, got {}", self.r2)));
        }
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(invalid("d", format!("must be positive, got {}", self.d)));
        }
        Ok(())
    }

    /// `R₁R₂/(R₁ + R₂)`, tending to `R₁` for a plane.
    pub fn reduced_radius(&self) -> f64 {
        if self.r2.is_infinite() {
            self.r1
        } else {
            self.r1 * self.r2 / (self.r1 + self.r2)
        }
    }

    /// True when `d/R` exceeds 0.2 for either body, where the expansion degrades.
    pub fn outside_validity(&self) -> bool {
        self.d / self.r1 > 0.2 || self.d / self.r2 > 0.2
    }
}

/// `E_PFA = −α π³ R₁R₂ / [1440 d² (R₁ + R₂)]`.
pub fn pfa_two_spheres(config: &TwoSphereConfig) -> Result<f64> {
    config.validate()?;
    let alpha = beta_table(config.kind).alpha;
    Ok(-alpha * PI.powi(3) * config.reduced_radius() / (1440.0 * config.d * config.d))
}

/// `E_PFA [1 − d/(R₁+R₂) + (2β − 1)(d/R₁ + d/R₂)]` for identical boundaries.
pub fn gradient_corrected_two_spheres(config: &TwoSphereConfig) -> Result<f64> {
    if config.kind.is_mixed() {
        return Err(invalid(
            "kind",
            "the closed two-sphere form needs identical boundary conditions; use gradient_expansion_energy",
        ));
    }
    let e = pfa_two_spheres(config)?;
    Ok(e * gradient_correction_factor(config))
}

/// The bracket multiplying `E_PFA` in [`gradient_corrected_two_spheres`].
pub fn gradient_correction_factor(config: &TwoSphereConfig) -> f64 {
    let beta = beta_table(config.kind).beta_1;
    let d = config.d;
    let sum_r = config.r1 + config.r2;
    let inv = d / config.r1 + d / config.r2;
    1.0 - d / sum_r + (2.0 * beta - 1.0) * inv
}

/// Heights on a uniform rectangular grid, row-major with `nx` points per row.
/// Grid points are cell centres for the midpoint rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceProfile {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub heights: Vec<f64>,
}

impl SurfaceProfile {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, heights: Vec<f64>) -> Result<Self> {
        let p = Self { nx, ny, dx, dy, heights };
        p.validate()?;
        Ok(p)
    }

    /// Samples `h(x, y)` at cell centres of `[−lx/2, lx/2] × [−ly/2, ly/2]`.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(nx: usize, ny: usize, lx: f64, ly: f64, h: F) -> Result<Self> {
        let dx = lx / nx as f64;
        let dy = ly / ny as f64;
        let mut heights = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let y = -0.5 * ly + (j as f64 + 0.5) * dy;
            for i in 0..nx {
                let x = -0.5 * lx + (i as f64 + 0.5) * dx;
                heights.push(h(x, y));
            }
        }
        Self::new(nx, ny, dx, dy, heights)
    }

    pub fn flat(nx: usize, ny: usize, dx: f64, dy: f64, h: f64) -> Result<Self> {
        Self::new(nx, ny, dx, dy, vec![h; nx * ny])
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(invalid("profile", format!("grid must be at least 2x2, got {}x{}", self.nx, self.ny)));
        }
        if !(self.dx > 0.0 && self.dy > 0.0) || !(self.dx.is_finite() && self.dy.is_finite()) {
            return Err(invalid("profile", format!("spacings must be positive, got ({}, {})", self.dx, self.dy)));
        }
        if self.heights.len() != self.nx * self.ny {
            return Err(invalid(
                "profile",
                format!("expected {} heights, got {}", self.nx * self.ny, self.heights.len()),
            ));
        }
        if let Some(h) = self.heights.iter().find(|h| !h.is_finite()) {
            return Err(invalid("profile", format!("non-finite height {h}")));
        }
        Ok(())
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.heights[j * self.nx + i]
    }

    /// Central differences inside, one-sided differences on the border.
    fn gradient(&self, i: usize, j: usize) -> (f64, f64) {
        let gx = if i == 0 {
            (self.at(1, j) - self.at(0, j)) / self.dx
        } else if i + 1 == self.nx {
            (self.at(i, j) - self.at(i - 1, j)) / self.dx
        } else {
            (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * self.dx)
        };
        let gy = if j == 0 {
            (self.at(i, 1) - self.at(i, 0)) / self.dy
        } else if j + 1 == self.ny {
            (self.at(i, j) - self.at(i, j - 1)) / self.dy
        } else {
            (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * self.dy)
        };
        (gx, gy)
    }

    /// Every second grid point in each direction, spacing doubled.
    pub fn coarsened(&self) -> Option<Self> {
        if self.nx < 4 || self.ny < 4 {
            return None;
        }
        let nx = self.nx.div_ceil(2);
        let ny = self.ny.div_ceil(2);
        let mut heights = Vec::with_capacity(nx * ny);
        for j in (0..self.ny).step_by(2) {
            for i in (0..self.nx).step_by(2) {
                heights.push(self.at(i, j));
            }
        }
        Some(Self {
            nx,
            ny,
            dx: 2.0 * self.dx,
            dy: 2.0 * self.dy,
            heights,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientEnergy {
    pub energy: f64,
    /// The same surface integral with all `β` set to zero.
    pub pfa: f64,
    pub max_slope: f64,
    /// `|∇H| > 0.3` somewhere.
    pub slope_warning: bool,
    /// Relative change against the grid with doubled spacing, if one exists.
    pub coarsening_change: Option<f64>,
    /// `coarsening_change > 1%`.
    pub grid_warning: bool,
}

fn surface_integral(p1: &SurfaceProfile, p2: &SurfaceProfile, pair: &BoundaryPair) -> Result<(f64, f64, f64)> {
    let mut total = CompensatedSum::new();
    let mut plain = CompensatedSum::new();
    let mut max_slope = 0.0f64;
    for j in 0..p1.ny {
        for i in 0..p1.nx {
            let h = p2.at(i, j) - p1.at(i, j);
            if !(h > 0.0) {
                return Err(domain(
                    "gradient_expansion_energy",
                    format!("non-positive gap {h} at grid point ({i}, {j})"),
                ));
            }
            let (ax, ay) = p1.gradient(i, j);
            let (bx, by) = p2.gradient(i, j);
            max_slope = max_slope.max(ax.hypot(ay)).max(bx.hypot(by));
            let u = pair.u(h);
            let bracket = 1.0
                + pair.beta_1 * (ax * ax + ay * ay)
                + pair.beta_2 * (bx * bx + by * by)
                + pair.beta_cross * (ax * bx + ay * by);
            total.add(u * bracket);
            plain.add(u);
        }
    }
    let cell = p1.dx * p1.dy;
    Ok((cell * total.value(), cell * plain.value(), max_slope))
}

/// Midpoint-rule evaluation of the two-surface derivative expansion.
///
/// The reference plane is the plane of the grid. Slopes of 1 or more are
/// rejected; above 0.3 a warning flag is set. The grid check compares with
/// the same integral on every second grid point.
pub fn gradient_expansion_energy(
    profile_1: &SurfaceProfile,
    profile_2: &SurfaceProfile,
    pair: &BoundaryPair,
) -> Result<GradientEnergy> {
    profile_1.validate()?;
    profile_2.validate()?;
    if profile_1.nx != profile_2.nx
        || profile_1.ny != profile_2.ny
        || profile_1.dx != profile_2.dx
        || profile_1.dy != profile_2.dy
    {
        return Err(invalid("profile", "the two grids are not aligned"));
    }
    let (energy, pfa, max_slope) = surface_integral(profile_1, profile_2, pair)?;
    if max_slope >= 1.0 {
        return Err(domain(
            "gradient_expansion_energy",
            format!("surface slope {max_slope:.3} outside the small-slope regime"),
        ));
    }
    let coarsening_change = match (profile_1.coarsened(), profile_2.coarsened()) {
        (Some(c1), Some(c2)) => {
            let (coarse, _, _) = surface_integral(&c1, &c2, pair)?;
            Some(((coarse - energy) / energy).abs())
        }
        _ => None,
    };
    Ok(GradientEnergy {
        energy,
        pfa,
        max_slope,
        slope_warning: max_slope > 0.3,
        coarsening_change,
        grid_warning: coarsening_change.is_some_and(|c| c > 0.01),
    })
}

/// Half-width at which a paraboloid `d + ρ²/2R` reaches the gap where
/// `U` has fallen to `1e−6` of its apex value.
pub fn paraboloid_patch_radius(r: f64, d: f64) -> f64 {
    let h_max = d * 1e2;
    (2.0 * r * (h_max - d)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let em = beta_table(BoundaryKind::EM);
        assert!((em.beta_1 + 0.346_545_169_756_711).abs() < 1e-14);
        let nd = beta_table(BoundaryKind::ND);
        assert_eq!(nd.beta_1, 2.0 / 3.0);
        assert!((nd.beta_2 + 0.491_289_717_817_194).abs() < 1e-14);
        assert!((beta_table(BoundaryKind::DD).beta_cross - 2.0 / 3.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn sphere_plate_pfa() {
        let c = TwoSphereConfig::sphere_plate(100.0, 1.0, BoundaryKind::DD);
        let e = pfa_two_spheres(&c).unwrap();
        assert!((e + PI.powi(3) * 100.0 / 1440.0).abs() < 1e-13);
        assert!((e + 2.153_213_658_354_154).abs() < 1e-13);
        let c2 = TwoSphereConfig { d: 2.0, ..c };
        assert!((pfa_two_spheres(&c2).unwrap() * 4.0 - e).abs() < 1e-14);
    }

    #[test]
    fn corrected_ratios() {
        let c = TwoSphereConfig::sphere_plate(1.0, 0.1, BoundaryKind::DD);
        assert!((gradient_correction_factor(&c) - (1.0 + 0.1 / 3.0)).abs() < 1e-15);
        let em = TwoSphereConfig {
            r1: 1.0,
            r2: 1.0,
            d: 0.05,
            kind: BoundaryKind::EM,
        };
        let expect = 1.0 - 0.025 + (2.0 * beta_em() - 1.0) * 0.1;
        assert!((gradient_correction_factor(&em) - expect).abs() < 1e-15);
        assert!((gradient_correction_factor(&em) - 0.805_690_966_048_658).abs() < 1e-14);
        let mixed = TwoSphereConfig { kind: BoundaryKind::DN, ..em };
        assert!(gradient_corrected_two_spheres(&mixed).is_err());
    }

    #[test]
    fn beta_cross_from_constraint() {
        let cube = |h: f64| -1.0 / (h * h * h);
        let v = beta_cross_general(2.0 / 3.0, 2.0 / 3.0, cube, 1.3).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-8);
        let square = |h: f64| -1.0 / (h * h);
        assert!((beta_cross_general(0.0, 0.0, square, 0.7).unwrap() - 1.5).abs() < 1e-8);
        assert!(beta_cross_general(0.0, 0.0, |_| 0.0, 1.0).is_err());
    }

    #[test]
    fn flat_profiles_give_area_times_u() {
        let p1 = SurfaceProfile::flat(10, 8, 0.1, 0.2, 0.0).unwrap();
        let p2 = SurfaceProfile::flat(10, 8, 0.1, 0.2, 0.5).unwrap();
        let pair = beta_table(BoundaryKind::EM);
        let r = gradient_expansion_energy(&p1, &p2, &pair).unwrap();
        let area = 1.0 * 1.6;
        assert!((r.energy - area * pair.u(0.5)).abs() < 1e-14);
        assert!(!r.grid_warning);
    }

    #[test]
    fn rejects_touching_profiles() {
        let p1 = SurfaceProfile::flat(4, 4, 0.1, 0.1, 0.0).unwrap();
        let p2 = SurfaceProfile::flat(4, 4, 0.1, 0.1, 0.0).unwrap();
        assert!(gradient_expansion_energy(&p1, &p2, &beta_table(BoundaryKind::DD)).is_err());
    }
}
