//! CSV tables and run manifests.
//!
//! CSVs are UTF-8 with LF line endings, a header row whose column names carry
//! their units, and the literal `NA` for missing values. Numbers use Rust's
//! shortest round-trip exponent form, so equal values always give equal bytes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::CliError;

pub const NA: &str = "NA";

pub fn num(x: f64) -> String {
    if x.is_nan() {
        NA.to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), num)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<String>) -> Self {
        Self { name: name.to_string(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::io(&self.name, e.into_error()))
    }
}

/// Everything a command produces, written only after all of it succeeded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    /// Human-readable report, written as `<command>.txt` and echoed.
    pub report: Option<(String, String)>,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Writes every table, the report and `manifest.toml` into `dir`.
pub fn write_all(dir: &Path, out: &RunOutput, manifest: &Config) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<(), CliError> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for t in &out.tables {
        put(&t.name, &t.to_bytes()?)?;
    }
    if let Some((name, text)) = &out.report {
        put(name, text.as_bytes())?;
    }
    put("manifest.toml", manifest.to_text().as_bytes())?;
    Ok(written)
}
