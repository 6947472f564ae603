use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Configuration problem located by source, line and key where known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub source: String,
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { source: String::new(), line: None, key: None, message: message.into() }
    }

    pub fn at_key(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: Some(key.into()), ..Self::new(message) }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config error")?;
        if !self.source.is_empty() {
            write!(f, " in {}", self.source)?;
        }
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, " ({key})")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("degenerate request: {0}")]
    Degenerate(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parameters(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Degenerate(_) => 4,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<dimerdyn_core::Error> for CliError {
    fn from(e: dimerdyn_core::Error) -> Self {
        use dimerdyn_core::Error as E;
        match e {
            E::Domain(m) | E::InvalidParameter(m) => CliError::Parameters(m),
            E::NonConvergence(m) => CliError::NonConvergence(m),
            E::Divergent(m) => CliError::Degenerate(m),
        }
    }
}
