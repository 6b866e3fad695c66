//! Run configuration: a strict INI dialect with dotted sections, command-line
//! overrides and a canonical serialisation.
//!
//! ```text
//! [run]
//! subcommand = plates
//! tol = 1e-8
//! format = json
//! units = natural
//!
//! [plates]
//! a = 1
//! temperature = 0
//!
//! [plates.material_1]
//! type = drude
//! omega_p = 9
//! gamma = 0.035
//! ```
//!
//! Keys inside `[sub.name]` are addressed as `name.key`; error messages use
//! the full path `sub.name.key`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use casimir_core::pfa_gradient::BoundaryKind;
use casimir_core::scattering::ScalarBc;
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

fn err<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        path: path.into(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subcommand {
    Plates,
    ThermalSweep,
    Pfa,
    Gradient,
    Spheres,
    SpherePlate,
    CasimirPolder,
    Strip,
    HalfPlane,
}

impl Subcommand {
    pub const ALL: [Subcommand; 9] = [
        Self::Plates,
        Self::ThermalSweep,
        Self::Pfa,
        Self::Gradient,
        Self::Spheres,
        Self::SpherePlate,
        Self::CasimirPolder,
        Self::Strip,
        Self::HalfPlane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Plates => "plates",
            Self::ThermalSweep => "thermal-sweep",
            Self::Pfa => "pfa",
            Self::Gradient => "gradient",
            Self::Spheres => "spheres",
            Self::SpherePlate => "sphere-plate",
            Self::CasimirPolder => "casimir-polder",
            Self::Strip => "strip",
            Self::HalfPlane => "half-plane",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Self::Plates => "Energy or free energy per area of two parallel plates",
            Self::ThermalSweep => "Free energy and entropy of two plates over a grid of separations and temperatures",
            Self::Pfa => "Proximity force approximation for spheres or two height profiles",
            Self::Gradient => "Derivative expansion beyond PFA for spheres or two height profiles",
            Self::Spheres => "Scattering energy of two scalar spheres",
            Self::SpherePlate => "Scattering energy of a scalar sphere above a plate",
            Self::CasimirPolder => "Retarded interaction of two polarisable particles",
            Self::Strip => "Energy per length of a conducting strip parallel to a plate",
            Self::HalfPlane => "Energy per length of a half-plane perpendicular to a plate",
        }
    }

    pub fn example(self) -> &'static str {
        match self {
            Self::Plates => "casimir plates --a 1 --material-1 pec --material-2 pec",
            Self::ThermalSweep => {
                "casimir thermal-sweep --separations 1,2,4 --temperatures 0.05,0.1 --material-1 drude:9:0.035 --material-2 drude:9:0.035 --format csv"
            }
            Self::Pfa => "casimir pfa --R1 10 --R2 inf --d 0.5 --kind EM",
            Self::Gradient => "casimir gradient --R1 10 --R2 20 --d 0.5 --kind DD",
            Self::Spheres => "casimir spheres --R1 1 --R2 1 --d 1 --bc-1 dirichlet --bc-2 neumann --tol 1e-6",
            Self::SpherePlate => "casimir sphere-plate --R 1 --d 0.5 --bc-sphere dirichlet --bc-plate dirichlet --tol 1e-6",
            Self::CasimirPolder => "casimir casimir-polder --alpha1 1 --alpha2 1 --d 1",
            Self::Strip => "casimir strip --d 5 --H 1",
            Self::HalfPlane => "casimir half-plane --H 1",
        }
    }

    pub fn params(self) -> &'static [Param] {
        const fn p(key: &'static str, value_name: &'static str, default: Option<&'static str>, help: &'static str) -> Param {
            Param {
                key,
                value_name,
                default,
                help,
            }
        }
        const MAT_1: Param = p("material_1", "MODEL", Some("pec"), "First plate: pec, vacuum, plasma:WP, drude:WP:GAMMA or constant:EPS");
        const MAT_2: Param = p("material_2", "MODEL", Some("pec"), "Second plate, same syntax as material-1");
        const KIND: Param = p("kind", "KIND", Some("DD"), "Boundary pair: DD, NN, DN, ND or EM");
        const R1: Param = p("R1", "LENGTH", None, "Radius of the first sphere");
        const R2: Param = p("R2", "LENGTH", Some("inf"), "Radius of the second sphere; inf for a plate");
        const D_GAP: Param = p("d", "LENGTH", None, "Closest surface separation");
        const PROF_1: Param = p("profile_1", "CSV", None, "Height grid of the lower surface (instead of R1/R2/d)");
        const PROF_2: Param = p("profile_2", "CSV", None, "Height grid of the upper surface");
        const L_MAX: Param = p("l_max", "INT", None, "Partial-wave truncation; default 8 + 4R/d capped at 100");
        const PLATES: &[Param] = &[
            p("a", "LENGTH", None, "Plate separation"),
            p("temperature", "TEMP", Some("0"), "Temperature; 0 uses the frequency integral"),
            MAT_1,
            MAT_2,
        ];
        const THERMAL: &[Param] = &[
            p("separations", "LIST", None, "Comma-separated increasing separations"),
            p("temperatures", "LIST", None, "Comma-separated increasing positive temperatures"),
            MAT_1,
            MAT_2,
        ];
        const PROXIMITY: &[Param] = &[KIND, R1, R2, D_GAP, PROF_1, PROF_2];
        const SPHERES: &[Param] = &[
            R1,
            p("R2", "LENGTH", None, "Radius of the second sphere"),
            D_GAP,
            p("bc_1", "BC", Some("dirichlet"), "Boundary condition on sphere 1: dirichlet or neumann"),
            p("bc_2", "BC", Some("dirichlet"), "Boundary condition on sphere 2: dirichlet or neumann"),
            L_MAX,
        ];
        const SPHERE_PLATE: &[Param] = &[
            p("R", "LENGTH", None, "Sphere radius"),
            D_GAP,
            p("bc_sphere", "BC", Some("dirichlet"), "Boundary condition on the sphere"),
            p("bc_plate", "BC", Some("dirichlet"), "Boundary condition on the plate"),
            L_MAX,
        ];
        const DIPOLES: &[Param] = &[
            p("alpha1", "VOLUME", None, "Static polarisability of particle 1"),
            p("alpha2", "VOLUME", None, "Static polarisability of particle 2"),
            p("d", "LENGTH", None, "Distance between the particles"),
        ];
        const STRIP: &[Param] = &[
            p("d", "LENGTH", None, "Half-width of the strip"),
            p("H", "LENGTH", None, "Height of the strip above the plate"),
            p("beta", "NUMBER", Some("0.00092"), "Single-edge constant"),
            p("gamma", "NUMBER", Some("-0.004"), "Edge-edge constant"),
        ];
        const HALF_PLANE: &[Param] = &[
            p("H", "LENGTH", None, "Height of the edge above the plate"),
            p("nu_max", "INT", Some("10"), "Determinant truncation, between 4 and 60"),
        ];
        match self {
            Self::Plates => PLATES,
            Self::ThermalSweep => THERMAL,
            Self::Pfa | Self::Gradient => PROXIMITY,
            Self::Spheres => SPHERES,
            Self::SpherePlate => SPHERE_PLATE,
            Self::CasimirPolder => DIPOLES,
            Self::Strip => STRIP,
            Self::HalfPlane => HALF_PLANE,
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError {
                path: "run.subcommand".into(),
                message: format!("unknown subcommand `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub value_name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

impl Param {
    /// Long flag name, e.g. `material-1` for `material_1`.
    pub fn flag(&self) -> String {
        self.key.replace('_', "-")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    /// `ħ = c = k_B = 1`, lengths in any consistent unit.
    Natural,
    /// Lengths in metres, temperatures in kelvin, material frequencies in eV.
    Si,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Self::Natural => "natural",
            Self::Si => "si",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub format: Format,
    pub units: Units,
}

/// Material parameters in the units of the run (eV for frequencies in SI mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialSpec {
    Pec,
    Vacuum,
    Plasma { omega_p: f64 },
    Drude { omega_p: f64, gamma: f64 },
    Constant { eps: f64 },
}

impl MaterialSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pec => "pec",
            Self::Vacuum => "vacuum",
            Self::Plasma { .. } => "plasma",
            Self::Drude { .. } => "drude",
            Self::Constant { .. } => "constant",
        }
    }

    /// Compact form used by the command-line flags.
    pub fn compact(&self) -> String {
        match *self {
            Self::Pec | Self::Vacuum => self.name().to_string(),
            Self::Plasma { omega_p } => format!("plasma:{omega_p}"),
            Self::Drude { omega_p, gamma } => format!("drude:{omega_p}:{gamma}"),
            Self::Constant { eps } => format!("constant:{eps}"),
        }
    }

    fn entries(&self, units: Units) -> Vec<(&'static str, String)> {
        let (wp, g) = match units {
            Units::Natural => ("omega_p", "gamma"),
            Units::Si => ("omega_p_ev", "gamma_ev"),
        };
        let mut v = vec![("type", self.name().to_string())];
        match *self {
            Self::Pec | Self::Vacuum => {}
            Self::Plasma { omega_p } => v.push((wp, omega_p.to_string())),
            Self::Drude { omega_p, gamma } => {
                v.push((wp, omega_p.to_string()));
                v.push((g, gamma.to_string()));
            }
            Self::Constant { eps } => v.push(("eps", eps.to_string())),
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Spheres { r1: f64, r2: f64, d: f64 },
    Profiles { profile_1: PathBuf, profile_2: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Plates {
        a: f64,
        temperature: f64,
        material_1: MaterialSpec,
        material_2: MaterialSpec,
    },
    ThermalSweep {
        separations: Vec<f64>,
        temperatures: Vec<f64>,
        material_1: MaterialSpec,
        material_2: MaterialSpec,
    },
    Pfa {
        kind: BoundaryKind,
        shape: Shape,
    },
    Gradient {
        kind: BoundaryKind,
        shape: Shape,
    },
    Spheres {
        r1: f64,
        r2: f64,
        d: f64,
        bc_1: ScalarBc,
        bc_2: ScalarBc,
        l_max: Option<usize>,
    },
    SpherePlate {
        r: f64,
        d: f64,
        bc_sphere: ScalarBc,
        bc_plate: ScalarBc,
        l_max: Option<usize>,
    },
    CasimirPolder {
        alpha1: f64,
        alpha2: f64,
        d: f64,
    },
    Strip {
        d: f64,
        h: f64,
        beta: f64,
        gamma: f64,
    },
    HalfPlane {
        h: f64,
        nu_max: usize,
    },
}

impl Job {
    pub fn subcommand(&self) -> Subcommand {
        match self {
            Self::Plates { .. } => Subcommand::Plates,
            Self::ThermalSweep { .. } => Subcommand::ThermalSweep,
            Self::Pfa { .. } => Subcommand::Pfa,
            Self::Gradient { .. } => Subcommand::Gradient,
            Self::Spheres { .. } => Subcommand::Spheres,
            Self::SpherePlate { .. } => Subcommand::SpherePlate,
            Self::CasimirPolder { .. } => Subcommand::CasimirPolder,
            Self::Strip { .. } => Subcommand::Strip,
            Self::HalfPlane { .. } => Subcommand::HalfPlane,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub settings: Settings,
    pub job: Job,
}

/// Sections in file order, each with `(key, value, line)` entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    pub sections: Vec<(String, Vec<(String, String, usize)>)>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut ini = Ini::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return err(format!("line {line_no}"), "unterminated section header");
                };
                let name = name.trim();
                if name.is_empty() || name.split('.').any(|p| p.is_empty()) {
                    return err(format!("line {line_no}"), format!("malformed section name `{name}`"));
                }
                if ini.sections.iter().any(|(s, _)| s == name) {
                    return err(name, format!("section repeated at line {line_no}"));
                }
                ini.sections.push((name.to_string(), Vec::new()));
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {line_no}"), "expected `key = value`");
            };
            let (k, v) = (k.trim(), v.trim());
            let Some((section, entries)) = ini.sections.last_mut() else {
                return err(format!("line {line_no}"), "key outside of any section");
            };
            if k.is_empty() || k.contains(char::is_whitespace) || k.contains('.') {
                return err(format!("{section} (line {line_no})"), format!("malformed key `{k}`"));
            }
            if entries.iter().any(|(e, _, _)| e == k) {
                return err(format!("{section}.{k}"), format!("key repeated at line {line_no}"));
            }
            entries.push((k.to_string(), v.to_string(), line_no));
        }
        Ok(ini)
    }
}

/// Flattened `key → value` entries of one subcommand, consumed as they are read.
struct Reader {
    sub: Subcommand,
    map: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

fn parse_f64(path: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if !x.is_nan() => Ok(x),
        _ => err(path, format!("expected a number, got `{v}`")),
    }
}

impl Reader {
    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.sub)
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.map.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn raw_or_default(&mut self, key: &str) -> Option<String> {
        self.raw(key).or_else(|| {
            self.sub
                .params()
                .iter()
                .find(|p| p.key == key)
                .and_then(|p| p.default.map(str::to_string))
        })
    }

    fn required(&mut self, key: &str) -> Result<String, ConfigError> {
        match self.raw_or_default(key) {
            Some(v) => Ok(v),
            None => err(self.path(key), "required but missing"),
        }
    }

    fn number(&mut self, key: &str) -> Result<f64, ConfigError> {
        let v = self.required(key)?;
        let x = parse_f64(&self.path(key), &v)?;
        if !x.is_finite() {
            return err(self.path(key), format!("must be finite, got {v}"));
        }
        Ok(x)
    }

    /// Strictly positive; `inf` only when `allow_inf`.
    fn length(&mut self, key: &str, allow_inf: bool) -> Result<f64, ConfigError> {
        let v = self.required(key)?;
        let x = parse_f64(&self.path(key), &v)?;
        if !(x > 0.0) || (x.is_infinite() && !allow_inf) {
            return err(self.path(key), format!("must be positive and finite, got {v}"));
        }
        Ok(x)
    }

    fn non_negative(&mut self, key: &str) -> Result<f64, ConfigError> {
        let x = self.number(key)?;
        if x < 0.0 {
            return err(self.path(key), format!("must be non-negative, got {x}"));
        }
        Ok(x)
    }

    fn integer(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.raw_or_default(key) {
            None => Ok(None),
            Some(v) => match v.parse::<usize>() {
                Ok(n) => Ok(Some(n)),
                Err(_) => err(self.path(key), format!("expected a non-negative integer, got `{v}`")),
            },
        }
    }

    fn list(&mut self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let v = self.required(key)?;
        let path = self.path(key);
        let xs = v
            .split(',')
            .map(|s| parse_f64(&path, s.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        if xs.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return err(path, "entries must be positive and finite");
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return err(path, "entries must be strictly increasing");
        }
        Ok(xs)
    }

    fn bc(&mut self, key: &str) -> Result<ScalarBc, ConfigError> {
        let v = self.required(key)?;
        v.parse().or_else(|_| err(self.path(key), format!("expected dirichlet or neumann, got `{v}`")))
    }

    fn kind(&mut self, key: &str) -> Result<BoundaryKind, ConfigError> {
        let v = self.required(key)?;
        v.parse()
            .or_else(|_| err(self.path(key), format!("expected DD, NN, DN, ND or EM, got `{v}`")))
    }

    fn has_any(&self, prefix: &str) -> bool {
        self.map.keys().any(|k| k == prefix || k.starts_with(&format!("{prefix}.")))
    }

    fn material(&mut self, prefix: &str, units: Units) -> Result<MaterialSpec, ConfigError> {
        if !self.has_any(prefix) {
            return Ok(MaterialSpec::Pec);
        }
        let ty_key = format!("{prefix}.type");
        let Some(ty) = self.raw(&ty_key) else {
            return err(self.path(&ty_key), "required but missing");
        };
        let (wp, g) = match units {
            Units::Natural => ("omega_p", "gamma"),
            Units::Si => ("omega_p_ev", "gamma_ev"),
        };
        let mut field = |name: &str| -> Result<f64, ConfigError> {
            let key = format!("{prefix}.{name}");
            let v = self.raw(&key);
            let path = self.path(&key);
            match v {
                Some(v) => parse_f64(&path, &v),
                None => err(path, "required but missing"),
            }
        };
        let spec = match ty.as_str() {
            "pec" => MaterialSpec::Pec,
            "vacuum" => MaterialSpec::Vacuum,
            "plasma" => MaterialSpec::Plasma { omega_p: field(wp)? },
            "drude" => MaterialSpec::Drude {
                omega_p: field(wp)?,
                gamma: field(g)?,
            },
            "constant" => MaterialSpec::Constant { eps: field("eps")? },
            other => {
                return err(
                    self.path(&ty_key),
                    format!("unknown model `{other}`; expected pec, vacuum, plasma, drude or constant"),
                )
            }
        };
        let bad = |name: &str, msg: &str| err(self.path(&format!("{prefix}.{name}")), msg.to_string());
        match spec {
            MaterialSpec::Plasma { omega_p } | MaterialSpec::Drude { omega_p, .. }
                if !(omega_p > 0.0 && omega_p.is_finite()) =>
            {
                bad(wp, "must be positive and finite")
            }
            MaterialSpec::Drude { gamma, .. } if !(gamma >= 0.0 && gamma.is_finite()) => {
                bad(g, "must be non-negative and finite")
            }
            MaterialSpec::Constant { eps } if !(eps >= 1.0 && eps.is_finite()) => bad("eps", "must be at least 1"),
            s => Ok(s),
        }
    }

    fn shape(&mut self) -> Result<Shape, ConfigError> {
        let profiles = self.map.contains_key("profile_1") || self.map.contains_key("profile_2");
        let spheres = self.map.contains_key("R1") || self.map.contains_key("d");
        match (profiles, spheres) {
            (true, true) => err(
                self.path("profile_1"),
                "give either profile grids or R1/R2/d, not both",
            ),
            (true, false) => Ok(Shape::Profiles {
                profile_1: PathBuf::from(self.required("profile_1")?),
                profile_2: PathBuf::from(self.required("profile_2")?),
            }),
            (false, _) => Ok(Shape::Spheres {
                r1: self.length("R1", false)?,
                r2: self.length("R2", true)?,
                d: self.length("d", false)?,
            }),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.map.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => err(self.path(k), "unknown key"),
            None => Ok(()),
        }
    }
}

fn build_job(sub: Subcommand, map: BTreeMap<String, String>, units: Units) -> Result<Job, ConfigError> {
    let mut r = Reader {
        sub,
        map,
        used: BTreeSet::new(),
    };
    let job = match sub {
        Subcommand::Plates => Job::Plates {
            a: r.length("a", false)?,
            temperature: r.non_negative("temperature")?,
            material_1: r.material("material_1", units)?,
            material_2: r.material("material_2", units)?,
        },
        Subcommand::ThermalSweep => Job::ThermalSweep {
            separations: r.list("separations")?,
            temperatures: r.list("temperatures")?,
            material_1: r.material("material_1", units)?,
            material_2: r.material("material_2", units)?,
        },
        Subcommand::Pfa => Job::Pfa {
            kind: r.kind("kind")?,
            shape: r.shape()?,
        },
        Subcommand::Gradient => Job::Gradient {
            kind: r.kind("kind")?,
            shape: r.shape()?,
        },
        Subcommand::Spheres => Job::Spheres {
            r1: r.length("R1", false)?,
            r2: r.length("R2", false)?,
            d: r.length("d", false)?,
            bc_1: r.bc("bc_1")?,
            bc_2: r.bc("bc_2")?,
            l_max: r.integer("l_max")?,
        },
        Subcommand::SpherePlate => Job::SpherePlate {
            r: r.length("R", false)?,
            d: r.length("d", false)?,
            bc_sphere: r.bc("bc_sphere")?,
            bc_plate: r.bc("bc_plate")?,
            l_max: r.integer("l_max")?,
        },
        Subcommand::CasimirPolder => {
            let alpha1 = r.non_negative("alpha1")?;
            let alpha2 = r.non_negative("alpha2")?;
            Job::CasimirPolder {
                alpha1,
                alpha2,
                d: r.length("d", false)?,
            }
        }
        Subcommand::Strip => Job::Strip {
            d: r.length("d", false)?,
            h: r.length("H", false)?,
            beta: r.number("beta")?,
            gamma: r.number("gamma")?,
        },
        Subcommand::HalfPlane => Job::HalfPlane {
            h: r.length("H", false)?,
            nu_max: r.integer("nu_max")?.unwrap_or(10),
        },
    };
    r.finish()?;
    Ok(job)
}

/// Expands `pec`, `plasma:WP`, `drude:WP:GAMMA`, `constant:EPS` into section keys.
fn expand_material(key: &str, value: &str, units: Units) -> Result<Vec<(String, String)>, ConfigError> {
    let (wp, g) = match units {
        Units::Natural => ("omega_p", "gamma"),
        Units::Si => ("omega_p_ev", "gamma_ev"),
    };
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let names: &[&str] = match parts[0] {
        "pec" | "vacuum" => &[],
        "plasma" => &[wp],
        "drude" => &[wp, g],
        "constant" => &["eps"],
        other => return err(key, format!("unknown model `{other}`")),
    };
    if parts.len() != names.len() + 1 {
        return err(
            key,
            format!("`{}` takes {} parameter(s), got `{value}`", parts[0], names.len()),
        );
    }
    let mut out = vec![(format!("{key}.type"), parts[0].to_string())];
    out.extend(names.iter().zip(&parts[1..]).map(|(n, v)| (format!("{key}.{n}"), v.to_string())));
    Ok(out)
}

fn parse_settings(map: &BTreeMap<String, String>) -> Result<Settings, ConfigError> {
    let tol = match map.get("tol") {
        Some(v) => parse_f64("run.tol", v)?,
        None => DEFAULT_TOL,
    };
    if !(tol > 0.0 && tol <= MAX_TOL) {
        return err("run.tol", format!("must lie in (0, {MAX_TOL}], got {tol}"));
    }
    let format = match map.get("format").map(String::as_str) {
        None | Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => return err("run.format", format!("expected json or csv, got `{other}`")),
    };
    let units = match map.get("units").map(String::as_str) {
        None | Some("natural") => Units::Natural,
        Some("si") => Units::Si,
        Some(other) => return err("run.units", format!("expected natural or si, got `{other}`")),
    };
    Ok(Settings { tol, format, units })
}

const SETTINGS_KEYS: [&str; 3] = ["tol", "format", "units"];

impl RunConfig {
    /// Builds a configuration from an optional file and command-line overrides.
    ///
    /// `flags` holds `(key, value)` pairs: `tol`, `format`, `units`, or a
    /// subcommand key (material flags take the compact `drude:WP:GAMMA` form).
    pub fn resolve(
        subcommand: Option<Subcommand>,
        file: Option<&str>,
        flags: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        let ini = match file {
            Some(text) => Ini::parse(text)?,
            None => Ini::default(),
        };
        let mut run: BTreeMap<String, String> = BTreeMap::new();
        let mut file_sub = None;
        for (name, entries) in &ini.sections {
            if name == "run" {
                for (k, v, _) in entries {
                    if k == "subcommand" {
                        file_sub = Some(v.parse::<Subcommand>()?);
                    } else if SETTINGS_KEYS.contains(&k.as_str()) {
                        run.insert(k.clone(), v.clone());
                    } else {
                        return err(format!("run.{k}"), "unknown key");
                    }
                }
            }
        }
        let sub = match (subcommand, file_sub) {
            (Some(a), Some(b)) if a != b => {
                return err("run.subcommand", format!("file is for `{b}` but `{a}` was requested"))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return err("run.subcommand", "no subcommand given"),
        };
        let mut body: BTreeMap<String, String> = BTreeMap::new();
        for (name, entries) in &ini.sections {
            if name == "run" {
                continue;
            }
            let prefix = if name == sub.name() {
                String::new()
            } else if let Some(rest) = name.strip_prefix(&format!("{}.", sub.name())) {
                format!("{rest}.")
            } else {
                return err(name.clone(), format!("unknown section for subcommand `{sub}`"));
            };
            for (k, v, _) in entries {
                body.insert(format!("{prefix}{k}"), v.clone());
            }
        }
        for (k, v) in flags {
            if SETTINGS_KEYS.contains(&k.as_str()) {
                run.insert(k.clone(), v.clone());
            }
        }
        let settings = parse_settings(&run)?;
        for (k, v) in flags {
            if SETTINGS_KEYS.contains(&k.as_str()) {
                continue;
            }
            if k.starts_with("material_") {
                body.retain(|key, _| !key.starts_with(&format!("{k}.")));
                for (ek, ev) in expand_material(&format!("{sub}.{k}"), v, settings.units)? {
                    let local = ek.strip_prefix(&format!("{sub}.")).unwrap_or(&ek).to_string();
                    body.insert(local, ev);
                }
            } else {
                body.insert(k.clone(), v.clone());
            }
        }
        let job = build_job(sub, body, settings.units)?;
        Ok(Self { settings, job })
    }

    pub fn from_ini(text: &str) -> Result<Self, ConfigError> {
        Self::resolve(None, Some(text), &[])
    }

    /// `(section, [(key, value)])` in canonical order.
    pub fn sections(&self) -> Vec<(String, Vec<(String, String)>)> {
        let sub = self.job.subcommand();
        let s = |x: f64| x.to_string();
        let opt = |x: Option<usize>| x.map(|n| n.to_string());
        let mut main: Vec<(&str, Option<String>)> = Vec::new();
        let mut materials: Vec<(&str, MaterialSpec)> = Vec::new();
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.job {
            Job::Plates {
                a,
                temperature,
                material_1,
                material_2,
            } => {
                main.push(("a", Some(s(*a))));
                main.push(("temperature", Some(s(*temperature))));
                materials = vec![("material_1", *material_1), ("material_2", *material_2)];
            }
            Job::ThermalSweep {
                separations,
                temperatures,
                material_1,
                material_2,
            } => {
                main.push(("separations", Some(list(separations))));
                main.push(("temperatures", Some(list(temperatures))));
                materials = vec![("material_1", *material_1), ("material_2", *material_2)];
            }
            Job::Pfa { kind, shape } | Job::Gradient { kind, shape } => {
                main.push(("kind", Some(format!("{kind:?}"))));
                match shape {
                    Shape::Spheres { r1, r2, d } => {
                        main.push(("R1", Some(s(*r1))));
                        main.push(("R2", Some(s(*r2))));
                        main.push(("d", Some(s(*d))));
                    }
                    Shape::Profiles { profile_1, profile_2 } => {
                        main.push(("profile_1", Some(profile_1.display().to_string())));
                        main.push(("profile_2", Some(profile_2.display().to_string())));
                    }
                }
            }
            Job::Spheres {
                r1,
                r2,
                d,
                bc_1,
                bc_2,
                l_max,
            } => {
                main.push(("R1", Some(s(*r1))));
                main.push(("R2", Some(s(*r2))));
                main.push(("d", Some(s(*d))));
                main.push(("bc_1", Some(bc_name(*bc_1))));
                main.push(("bc_2", Some(bc_name(*bc_2))));
                main.push(("l_max", opt(*l_max)));
            }
            Job::SpherePlate {
                r,
                d,
                bc_sphere,
                bc_plate,
                l_max,
            } => {
                main.push(("R", Some(s(*r))));
                main.push(("d", Some(s(*d))));
                main.push(("bc_sphere", Some(bc_name(*bc_sphere))));
                main.push(("bc_plate", Some(bc_name(*bc_plate))));
                main.push(("l_max", opt(*l_max)));
            }
            Job::CasimirPolder { alpha1, alpha2, d } => {
                main.push(("alpha1", Some(s(*alpha1))));
                main.push(("alpha2", Some(s(*alpha2))));
                main.push(("d", Some(s(*d))));
            }
            Job::Strip { d, h, beta, gamma } => {
                main.push(("d", Some(s(*d))));
                main.push(("H", Some(s(*h))));
                main.push(("beta", Some(s(*beta))));
                main.push(("gamma", Some(s(*gamma))));
            }
            Job::HalfPlane { h, nu_max } => {
                main.push(("H", Some(s(*h))));
                main.push(("nu_max", Some(nu_max.to_string())));
            }
        }
        let mut out = vec![
            (
                "run".to_string(),
                vec![
                    ("subcommand".to_string(), sub.name().to_string()),
                    ("tol".to_string(), s(self.settings.tol)),
                    ("format".to_string(), self.settings.format.name().to_string()),
                    ("units".to_string(), self.settings.units.name().to_string()),
                ],
            ),
            (
                sub.name().to_string(),
                main.into_iter()
                    .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
                    .collect(),
            ),
        ];
        for (name, m) in materials {
            out.push((
                format!("{sub}.{name}"),
                m.entries(self.settings.units)
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect(),
            ));
        }
        out
    }

    /// Canonical INI text; parsing it returns an identical configuration.
    pub fn to_ini(&self) -> String {
        let mut text = String::new();
        for (i, (name, entries)) in self.sections().iter().enumerate() {
            if i > 0 {
                text.push('\n');
            }
            let _ = writeln!(text, "[{name}]");
            for (k, v) in entries {
                let _ = writeln!(text, "{k} = {v}");
            }
        }
        text
    }
}

pub fn bc_name(bc: ScalarBc) -> String {
    match bc {
        ScalarBc::Dirichlet => "dirichlet".into(),
        ScalarBc::Neumann => "neumann".into(),
    }
}
