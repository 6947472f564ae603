//! Flat `section.key = value` configuration.
//!
//! Files are TOML restricted to dotted keys; nested tables are flattened so
//! `[bath]\np = 0.5` and `bath.p = 0.5` are the same entry. Energies carry
//! their unit in the key suffix (`_mev` or `_ps_inv`), exactly one per
//! quantity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dimerdyn_core::spectral::mev_to_ps_inv;
use toml::Value;

use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: Value,
    line: Option<usize>,
    source: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

/// Line of `key = ...` in `text`, matching either the full dotted key or its
/// last segment.
fn find_line(text: &str, key: &str) -> Option<usize> {
    let last = key.rsplit('.').next().unwrap_or(key);
    let starts = |line: &str, k: &str| {
        line.strip_prefix(k).is_some_and(|rest| rest.trim_start().starts_with('='))
    };
    let lines: Vec<&str> = text.lines().map(str::trim_start).collect();
    lines
        .iter()
        .position(|l| starts(l, key))
        .or_else(|| lines.iter().position(|l| starts(l, last)))
        .map(|i| i + 1)
}

/// Line number from a TOML parse error message (`line N, column M`).
fn parse_error_line(msg: &str) -> Option<usize> {
    let i = msg.find("line ")?;
    msg[i + 5..].split(|c: char| !c.is_ascii_digit()).next()?.parse().ok()
}

impl Config {
    pub fn parse(text: &str, source: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let msg = e.to_string();
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .or_else(|| parse_error_line(&msg));
            ConfigError {
                source: source.to_string(),
                line,
                key: None,
                message: e.message().trim().to_string(),
            }
        })?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat);
        let mut entries = BTreeMap::new();
        for (key, value) in flat {
            let line = find_line(text, &key);
            entries.insert(key, Entry { value, line, source: source.to_string() });
        }
        Ok(Self { entries })
    }

    /// Entries of `other` replace those of `self`.
    pub fn merge(&mut self, other: Config) {
        self.entries.extend(other.entries);
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.entries.insert(key.to_string(), Entry { value, line: None, source: "resolved".into() });
    }

    pub fn set_default(&mut self, key: &str, value: Value) {
        if !self.contains(key) {
            self.entries.insert(key.to_string(), Entry { value, line: None, source: "default".into() });
        }
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.remove(key);
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        match self.entries.get(key) {
            Some(e) => ConfigError {
                source: e.source.clone(),
                line: e.line,
                key: Some(key.to_string()),
                message: message.into(),
            },
            None => ConfigError::at_key(key, message),
        }
    }

    fn value(&self, key: &str) -> Option<&Value> {
        self.entries.get(key).map(|e| &e.value)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Float(x)) if x.is_finite() => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(self.error(key, format!("expected a finite number, got {v}"))),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.f64(key)?.ok_or_else(|| ConfigError::at_key(key, "missing required number"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(v) => Err(self.error(key, format!("expected a non-negative integer, got {v}"))),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        Ok(self.usize(key)?.map(|v| v as u64))
    }

    pub fn str(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(self.error(key, format!("expected a string, got {v}"))),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(self.error(key, format!("expected true or false, got {v}"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Float(x) if x.is_finite() => Ok(*x),
                    Value::Integer(i) => Ok(*i as f64),
                    other => Err(self.error(key, format!("list entries must be numbers, got {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(v) => Err(self.error(key, format!("expected a list of numbers, got {v}"))),
        }
    }

    pub fn str_list(&self, key: &str) -> Result<Option<Vec<String>>, ConfigError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    other => Err(self.error(key, format!("list entries must be strings, got {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(v) => Err(self.error(key, format!("expected a list of strings, got {v}"))),
        }
    }

    /// Energy `base` in ps⁻¹ from exactly one of `base_mev` / `base_ps_inv`.
    pub fn energy(&self, base: &str) -> Result<Option<f64>, ConfigError> {
        let mev = format!("{base}_mev");
        let ps = format!("{base}_ps_inv");
        match (self.f64(&mev)?, self.f64(&ps)?) {
            (Some(_), Some(_)) => Err(self.error(&ps, format!("give exactly one of {mev} and {ps}"))),
            (Some(e), None) => Ok(Some(mev_to_ps_inv(e))),
            (None, Some(e)) => Ok(Some(e)),
            (None, None) => Ok(None),
        }
    }

    pub fn require_energy(&self, base: &str) -> Result<f64, ConfigError> {
        self.energy(base)?
            .ok_or_else(|| ConfigError::at_key(format!("{base}_mev|{base}_ps_inv"), "missing required energy"))
    }

    /// Every key must satisfy `known`.
    pub fn check_keys(&self, known: impl Fn(&str) -> bool) -> Result<(), ConfigError> {
        match self.entries.keys().find(|k| !known(k)) {
            Some(k) => Err(self.error(k, "unknown key")),
            None => Ok(()),
        }
    }

    /// Sorted `key = value` lines, parseable by [`Config::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, e) in &self.entries {
            let _ = writeln!(out, "{k} = {}", e.value);
        }
        out
    }
}
