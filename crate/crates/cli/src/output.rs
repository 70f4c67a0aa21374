//! CSV tables, JSON files and the run manifest written beside every output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nmep_core::{Rates, SystemConfig};
use serde::Serialize;

use crate::args::OutputArgs;
use crate::CliError;

/// Where a command writes: `--out` wins, else `--out-dir/<default_name>`.
pub fn data_path(output: &OutputArgs, default_name: &str) -> Result<PathBuf, CliError> {
    match (&output.out, &output.out_dir) {
        (Some(out), _) => Ok(out.clone()),
        (None, Some(dir)) => Ok(dir.join(default_name)),
        (None, None) => Err(CliError::Invalid("an output location is required (--out or --out-dir)".into())),
    }
}

/// `<dir>/<stem>.<suffix>` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => fs::create_dir_all(parent).map_err(|e| io_error(parent, e)),
        _ => Ok(()),
    }
}

pub fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// A float column entry, full precision and locale-free.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row and `\n` line ends.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.text)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured <= tolerance` (NaN fails).
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config: Option<SystemConfig>,
    pub rates: Option<Rates>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: Option<&SystemConfig>) -> Self {
        RunManifest {
            tool: "nmep",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            config: config.copied(),
            rates: config.map(SystemConfig::rates),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            failures: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), value);
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn check(&mut self, check: Check) {
        if !check.pass {
            self.failures.push(check.name.clone());
        }
        self.checks.push(check);
    }

    /// Writes `<stem>.manifest.json` next to the main output.
    pub fn write_beside(&self, data: &Path) -> Result<PathBuf, CliError> {
        let path = sibling(data, "manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_full_precision() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn csv_rows_end_with_line_feed() {
        let mut csv = Csv::new(&["t", "x"]);
        csv.row(&[float(0.0), float(1.0)]);
        assert_eq!(csv.text, "t,x\n0.0000000000000000e0,1.0000000000000000e0\n");
    }

    #[test]
    fn manifest_sits_beside_data() {
        assert_eq!(sibling(Path::new("run/a.csv"), "manifest.json"), PathBuf::from("run/a.manifest.json"));
        let none = OutputArgs { out: None, out_dir: None };
        assert!(matches!(data_path(&none, "x.csv"), Err(CliError::Invalid(_))));
    }

    #[test]
    fn nan_measurement_fails() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).pass);
        assert!(Check::at_most("x", 1.0, 1.0).pass);
    }
}
