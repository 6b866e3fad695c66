//! Machine-readable reports: versioned JSON or one CSV table per subcommand.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig, Subcommand};

pub const SCHEMA_VERSION: u32 = 1;

pub type Row = Map<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarningKind {
    /// A numerical result missed its accuracy target; exit code 2.
    Convergence,
    /// Parameters lie outside the regime where the approximation is trusted.
    Validity,
}

impl WarningKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Convergence => "convergence",
            Self::Validity => "validity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub kind: WarningKind,
    pub row: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    pub rows: Vec<Row>,
    pub warnings: Vec<Warning>,
    pub wall_time_s: f64,
}

/// A JSON number, or `null` for NaN and infinities.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Frozen CSV columns; JSON rows carry these keys first, then extras.
pub fn columns(sub: Subcommand) -> &'static [&'static str] {
    match sub {
        Subcommand::Plates => &[
            "a",
            "T",
            "total",
            "te",
            "tm",
            "zero_mode",
            "error_estimate",
            "model_1",
            "model_2",
        ],
        Subcommand::ThermalSweep => &["a", "T", "F_per_A", "S_per_A", "zero_mode_share", "model_1", "model_2"],
        Subcommand::Pfa | Subcommand::Gradient => {
            &["kind", "R1", "R2", "d", "energy", "energy_pfa", "error_estimate", "method"]
        }
        Subcommand::Spheres => &["R1", "R2", "d", "bc_1", "bc_2", "energy", "error_estimate", "l_max"],
        Subcommand::SpherePlate => &["R", "d", "bc_sphere", "bc_plate", "energy", "error_estimate", "l_max"],
        Subcommand::CasimirPolder => &["alpha1", "alpha2", "d", "energy", "error_estimate"],
        Subcommand::Strip => &["d", "H", "beta", "gamma", "E_per_L", "error_estimate"],
        Subcommand::HalfPlane => &["H", "nu_max", "E_per_L", "C_perp", "error_estimate"],
    }
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.get("error").is_some_and(|e| !e.is_null()))
    }

    /// 1 when a row failed, 2 for convergence warnings, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.has_errors() {
            1
        } else if self.warnings.iter().any(|w| w.kind == WarningKind::Convergence) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> Value {
        let sub = self.config.job.subcommand();
        let units = self.config.settings.units;
        let mut quantities = Map::new();
        for (k, v) in units.describe() {
            quantities.insert(k.into(), Value::String(v.into()));
        }
        let mut config = Map::new();
        for (section, entries) in self.config.sections() {
            let mut m = Map::new();
            for (k, v) in entries {
                m.insert(k, Value::String(v));
            }
            config.insert(section, Value::Object(m));
        }
        let warnings: Vec<Value> = self
            .warnings
            .iter()
            .map(|w| json!({"kind": w.kind.name(), "row": w.row, "message": w.message}))
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "tool": "casimir",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": sub.name(),
            "units": {"system": units.name(), "quantities": quantities},
            "config": config,
            "columns": columns(sub),
            "results": self.rows,
            "warnings": warnings,
            "wall_time_s": num(self.wall_time_s),
        })
    }

    pub fn to_csv(&self) -> String {
        let cols = columns(self.config.job.subcommand());
        let mut out = cols.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = cols.iter().map(|c| csv_cell(row.get(*c))).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self) -> String {
        match self.config.settings.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialise");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }
}

fn csv_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
