//! Command-line front end: configuration, parameter sweeps, CSV tables and
//! run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod params;
pub mod presets;
pub mod sweep;

use std::fs;
use std::path::PathBuf;

use clap::Parser;
use toml::Value;

pub use commands::Command;
use config::Config;
pub use error::{CliError, ConfigError};
use output::write_all;

#[derive(Debug, Clone, Parser)]
#[command(name = "dimerdyn", version, about = "Relaxation rates and decoherence of a two-level dimer")]
pub struct Cli {
    /// rates | dynamics | decoherence | figures | validate | oracle
    pub command: Command,
    /// Config file of dotted `section.key = value` entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Named parameter set; file entries override it.
    #[arg(long)]
    pub preset: Option<String>,
    /// Seed for the noise oracle.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub command: Command,
    pub files: Vec<PathBuf>,
    pub report: Option<String>,
}

fn load(cli: &Cli) -> Result<(Config, Command, Option<String>), CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Some(Config::parse(&text, &path.display().to_string())?)
        }
        None => None,
    };
    let recorded = match &file {
        Some(f) => f.str("run.preset")?.map(str::to_string),
        None => None,
    };
    let preset_name = match (&cli.preset, cli.command) {
        (Some(p), _) => Some(p.clone()),
        // a figures manifest names its preset
        (None, Command::Figures) => recorded,
        (None, _) => None,
    };
    let preset = match &preset_name {
        Some(name) => Some(presets::find(name).ok_or_else(|| {
            ConfigError::new(format!("unknown preset {name:?}; known: {}", presets::names().collect::<Vec<_>>().join(", ")))
        })?),
        None => None,
    };
    let command = match (cli.command, preset) {
        (Command::Figures, Some(p)) if presets::FIGURE_PRESETS.contains(&p.name) => p.command.parse()?,
        (Command::Figures, Some(p)) => {
            return Err(ConfigError::new(format!(
                "figures accepts only the presets {}; got {}",
                presets::FIGURE_PRESETS.join(", "),
                p.name
            ))
            .into())
        }
        (Command::Figures, None) => return Err(ConfigError::new("figures needs --preset").into()),
        (c, _) => c,
    };
    let mut cfg = match preset {
        Some(p) => p.config()?,
        None => Config::default(),
    };
    match file {
        Some(f) => cfg.merge(f),
        None if preset.is_none() => return Err(ConfigError::new("give --config, --preset or both").into()),
        None => {}
    }
    let run_keys: Vec<String> = cfg.keys().filter(|k| k.starts_with("run.")).map(str::to_string).collect();
    for k in run_keys {
        cfg.remove(&k);
    }
    if let Some(seed) = cli.seed {
        cfg.set("oracle.seed", Value::Integer(seed as i64));
    }
    Ok((cfg, command, preset_name))
}

fn manifest(cfg: &Config, cli: &Cli, command: Command, preset: Option<&str>) -> Config {
    let mut m = cfg.clone();
    m.set("run.command", Value::String(command.name().into()));
    if cli.command == Command::Figures {
        m.set("run.invoked_as", Value::String(Command::Figures.name().into()));
    }
    if let Some(p) = preset {
        m.set("run.preset", Value::String(p.into()));
    }
    m.set("run.version", Value::String(env!("CARGO_PKG_VERSION").into()));
    if let Some(seed) = cli.seed {
        m.set("run.seed", Value::Integer(seed as i64));
    }
    for (name, v) in dimerdyn_core::rates::engine_tolerances() {
        m.set(&format!("run.tolerance.{name}"), Value::Float(v));
    }
    m
}

fn run_inner(cli: &Cli) -> Result<RunSummary, CliError> {
    let (mut cfg, command, preset) = load(cli)?;
    let out = commands::execute(command, &mut cfg)?;
    let m = manifest(&cfg, cli, command, preset.as_deref());
    let files = write_all(&cli.out, &out.output, &m)?;
    if let Some(e) = out.deferred {
        return Err(e);
    }
    Ok(RunSummary { command, files, report: out.output.report.map(|r| r.1) })
}

/// Runs one command. Nothing is written unless the inputs are valid; grid
/// points that fail to converge are written as `NA` and then reported.
pub fn run(cli: &Cli) -> Result<RunSummary, CliError> {
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Parameters(format!("thread pool: {e}")))?
            .install(|| run_inner(cli)),
        None => run_inner(cli),
    }
}
