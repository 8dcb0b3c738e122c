//! Table rendering and sidecar metadata.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A numeric table with named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    #[cfg(test)]
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// Scientific notation with 17 significant digits, enough to round-trip an f64.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// `results/fig.csv` -> `results/fig.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string());
    out.with_file_name(format!("{stem}.meta.json"))
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a, P: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub units: qcap::UnitMode,
    pub format: Format,
    pub seed: u64,
    pub parameters: &'a P,
    pub columns: &'a [&'static str],
    pub rows: usize,
}

/// Writes `body` to `out` (or stdout) and, for files, the JSON sidecar.
pub fn emit<P: Serialize>(
    out: Option<&Path>,
    body: &str,
    sidecar: Option<&Sidecar<'_, P>>,
) -> io::Result<()> {
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, body)?;
            if let Some(meta) = sidecar {
                let mut json = serde_json::to_string_pretty(meta).map_err(io::Error::other)?;
                json.push('\n');
                fs::write(sidecar_path(path), json)?;
            }
            Ok(())
        }
    }
}
