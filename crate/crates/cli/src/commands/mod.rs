mod decoherence;
mod dynamics;
mod oracle;
mod rates;
mod validate;

use std::fmt;
use std::str::FromStr;

use dimerdyn_core::regimes::{FlagStatus, RegimeFlag, RegimeReport, MUCH_LESS_THRESHOLD};
use rayon::prelude::*;
use toml::Value;

use crate::config::Config;
use crate::error::{CliError, ConfigError};
use crate::output::{num, opt, RunOutput};
use crate::params::{is_parameter_key, KernelPool, Point, Setup};
use crate::sweep::{is_sweep_key, Axis, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rates,
    Dynamics,
    Decoherence,
    Figures,
    Validate,
    Oracle,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Rates, Command::Dynamics, Command::Decoherence, Command::Figures, Command::Validate, Command::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::Dynamics => "dynamics",
            Command::Decoherence => "decoherence",
            Command::Figures => "figures",
            Command::Validate => "validate",
            Command::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::new(format!("unknown command {s:?}")))
    }
}

const SECTION_KEYS: &[&str] = &[
    "dynamics.p0",
    "dynamics.rho12_re",
    "dynamics.rho12_im",
    "dynamics.mode",
    "oracle.n_paths",
    "oracle.dt",
    "oracle.t_max",
    "oracle.lambda",
    "oracle.y",
    "oracle.frequency_nodes",
    "oracle.seed",
    "regimes.c_const",
    "regimes.decay",
    "tolerances.much_less_threshold",
    "tolerances.oracle_sigma",
    "output.marcus_curve",
    "output.marcus_curve_points",
];

/// Every key a config may contain; `run.*` is written by manifests and
/// ignored on input.
pub fn is_known_key(key: &str) -> bool {
    key.starts_with("run.") || is_parameter_key(key) || is_sweep_key(key) || SECTION_KEYS.contains(&key)
}

/// Result of a command: tables to write plus an error to report after
/// writing them (points that failed to converge are kept as `NA` rows).
pub struct CommandOutput {
    pub output: RunOutput,
    pub deferred: Option<CliError>,
}

impl From<RunOutput> for CommandOutput {
    fn from(output: RunOutput) -> Self {
        Self { output, deferred: None }
    }
}

pub fn execute(command: Command, cfg: &mut Config) -> Result<CommandOutput, CliError> {
    cfg.check_keys(is_known_key)?;
    match command {
        Command::Rates => rates::run(cfg),
        Command::Dynamics => dynamics::run(cfg).map(Into::into),
        Command::Decoherence => decoherence::run(cfg).map(Into::into),
        Command::Validate => validate::run(cfg).map(Into::into),
        Command::Oracle => oracle::run(cfg).map(Into::into),
        Command::Figures => Err(ConfigError::new("figures runs through a preset's own command").into()),
    }
}

/// Setup, kernel pool and parameter grid shared by the sweep commands.
struct Sweep {
    setup: Setup,
    pool: KernelPool,
    grid: Grid,
    time: Option<Axis>,
}

impl Sweep {
    fn from_config(cfg: &mut Config, allowed: &[&str]) -> Result<Self, CliError> {
        let setup = Setup::from_config(cfg)?;
        let (grid, time) = Grid::from_config(cfg, allowed)?.split_time()?;
        let pool = KernelPool::new(setup.method);
        let sweep = Self { setup, pool, grid, time };
        // surface parameter errors before any work
        sweep.point(0)?;
        Ok(sweep)
    }

    fn point(&self, i: usize) -> Result<Point, CliError> {
        self.setup.with_axes(&self.grid.point(i))?.build()
    }

    /// `f` on every grid point in parallel, results in grid order.
    fn map<T, F>(&self, f: F) -> Result<Vec<T>, CliError>
    where
        T: Send,
        F: Fn(usize, Point) -> Result<T, CliError> + Sync + Send,
    {
        (0..self.grid.len()).into_par_iter().map(|i| f(i, self.point(i)?)).collect()
    }

    /// Physical times of the time axis.
    fn times_ps(&self) -> Option<Vec<f64>> {
        self.time.as_ref().map(|a| match a.name.as_str() {
            "tau" => a.values.iter().map(|t| t * self.setup.beta).collect(),
            _ => a.values.clone(),
        })
    }
}

fn threshold(cfg: &mut Config) -> Result<f64, ConfigError> {
    cfg.set_default("tolerances.much_less_threshold", Value::Float(MUCH_LESS_THRESHOLD));
    let t = cfg.f64_or("tolerances.much_less_threshold", MUCH_LESS_THRESHOLD)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(cfg.error("tolerances.much_less_threshold", "threshold must lie in (0, 1)"));
    }
    Ok(t)
}

/// Flags reclassified with a configured "≪" threshold.
fn reclassify(report: &RegimeReport, threshold: f64) -> Vec<RegimeFlag> {
    report.flags.iter().map(|f| RegimeFlag::with_threshold(f.name.clone(), f.small, f.large, threshold)).collect()
}

fn overall(flags: &[RegimeFlag]) -> FlagStatus {
    flags.iter().map(|f| f.status).max().unwrap_or(FlagStatus::Satisfied)
}

/// Columns describing a grid point.
const POINT_HEADER: &[&str] = &[
    "point",
    "eps_dimensionless",
    "x_dimensionless",
    "y_dimensionless",
    "eps_l1_dimensionless",
    "eps_l2_dimensionless",
    "eta1_dimensionless",
    "eta2_dimensionless",
    "p1",
    "p2",
    "lambda1",
    "lambda2",
];

fn point_cells(i: usize, pt: &Point) -> Vec<String> {
    let d = &pt.dimensionless;
    let xy = d.xy();
    let local = (!pt.model.is_collective()).then_some(d.eps_l);
    vec![
        i.to_string(),
        num(d.eps),
        opt(xy.map(|v| v.0)),
        opt(xy.map(|v| v.1)),
        opt(local.map(|e| e[0])),
        opt(local.map(|e| e[1])),
        num(d.eta[0]),
        num(d.eta[1]),
        num(d.p[0]),
        num(d.p[1]),
        num(pt.dimer.lambda1),
        num(pt.dimer.lambda2),
    ]
}

fn header(extra: &[&str]) -> Vec<String> {
    POINT_HEADER.iter().chain(extra).map(|s| s.to_string()).collect()
}
