//! Command-line parsing and the process-level flow: exit codes, threads,
//! where the report goes.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::config::{RunConfig, Subcommand, DEFAULT_TOL, MAX_TOL};
use crate::output::write_atomic;
use crate::run::run;

pub const THREADS_ENV: &str = "CASIMIR_THREADS";

const GLOBAL_KEYS: [&str; 3] = ["tol", "format", "units"];

fn global_args() -> Vec<Arg> {
    vec![
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .global(true)
            .help_heading("Run options")
            .help("INI run file; flags given alongside override its values"),
        Arg::new("tol")
            .long("tol")
            .value_name("TOL")
            .global(true)
            .help_heading("Run options")
            .help(format!("Relative tolerance in (0, {MAX_TOL}] [default: {DEFAULT_TOL:e}]")),
        Arg::new("format")
            .long("format")
            .value_name("FORMAT")
            .global(true)
            .help_heading("Run options")
            .help("Output format: json or csv [default: json]"),
        Arg::new("units")
            .long("units")
            .value_name("UNITS")
            .global(true)
            .help_heading("Run options")
            .help("natural (ħ = c = k_B = 1) or si (metres, kelvin, eV, joules) [default: natural]"),
        Arg::new("out")
            .long("out")
            .value_name("PATH")
            .global(true)
            .help_heading("Run options")
            .help("Write the report to PATH instead of standard output"),
    ]
}

fn subcommand(sub: Subcommand) -> Command {
    let mut cmd = Command::new(sub.name())
        .about(sub.about())
        .after_help(format!("Example:\n  {}", sub.example()));
    for p in sub.params() {
        let help = match p.default {
            Some(d) => format!("{} [default: {d}]", p.help),
            None => p.help.to_string(),
        };
        cmd = cmd.arg(
            Arg::new(p.key)
                .long(p.flag())
                .value_name(p.value_name)
                .action(ArgAction::Set)
                .allow_hyphen_values(true)
                .help(help),
        );
    }
    cmd
}

pub fn command() -> Command {
    let examples: Vec<String> = Subcommand::ALL.iter().map(|s| format!("  {}", s.example())).collect();
    let mut cmd = Command::new("casimir")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Casimir energies, forces and free energies for canonical geometries")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .args(global_args())
        .after_help(format!(
            "Examples:\n{}\n  casimir run sweep.ini\n\nExit codes: 0 success, 2 convergence warning, 1 error.\n\
             {THREADS_ENV} caps the number of worker threads.",
            examples.join("\n")
        ));
    for sub in Subcommand::ALL {
        cmd = cmd.subcommand(subcommand(sub));
    }
    cmd.subcommand(
        Command::new("run")
            .about("Run the subcommand named in an INI file")
            .arg(Arg::new("file").value_name("CONFIG").required(true).help("INI run file"))
            .after_help("Example:\n  casimir run sweep.ini --format csv --out sweep.csv"),
    )
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn resolve(matches: &ArgMatches) -> Result<RunConfig, String> {
    let (name, sub_matches) = matches.subcommand().ok_or("no subcommand given")?;
    let read = |p: &str| fs::read_to_string(p).map_err(|e| format!("{p}: {e}"));
    let mut flags: Vec<(String, String)> = Vec::new();
    for k in GLOBAL_KEYS {
        if let Some(v) = sub_matches.get_one::<String>(k) {
            flags.push((k.to_string(), v.clone()));
        }
    }
    let config_file = sub_matches.get_one::<String>("config");
    if name == "run" {
        if config_file.is_some() {
            return Err("`run` takes the INI file as its argument; drop --config".into());
        }
        let path = sub_matches.get_one::<String>("file").expect("required");
        return RunConfig::resolve(None, Some(&read(path)?), &flags).map_err(|e| e.to_string());
    }
    let sub: Subcommand = name.parse().map_err(|e: crate::config::ConfigError| e.to_string())?;
    for p in sub.params() {
        if let Some(v) = sub_matches.get_one::<String>(p.key) {
            flags.push((p.key.to_string(), v.clone()));
        }
    }
    let text = config_file.map(|p| read(p)).transpose()?;
    RunConfig::resolve(Some(sub), text.as_deref(), &flags).map_err(|e| e.to_string())
}

/// Runs the tool and returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 1;
    }
    let config = match resolve(&matches) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    for w in &report.warnings {
        eprintln!("warning ({}): {}", w.kind.name(), w.message);
    }
    for row in &report.rows {
        if let Some(serde_json::Value::String(e)) = row.get("error") {
            eprintln!("error: {e}");
        }
    }
    let text = report.render();
    let out = matches.subcommand().and_then(|(_, m)| m.get_one::<String>("out")).map(PathBuf::from);
    let written = match out {
        Some(path) => write_atomic(&path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    report.exit_code()
}
