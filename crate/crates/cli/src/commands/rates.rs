use dimerdyn_core::dynamics::equilibrium_population;
use dimerdyn_core::rates::{
    gamma_exact, gamma_high_temp_partial, gamma_marcus_generalized, gamma_marcus_standard, lamb_shift,
    marcus_upper_bound,
};
use dimerdyn_core::regimes::{check_high_temp_partial_regime, check_marcus_regime};
use dimerdyn_core::spectral::SpectralModel;
use dimerdyn_core::Error as CoreError;
use rayon::prelude::*;
use toml::Value;

use super::{header, overall, point_cells, reclassify, threshold, CommandOutput, Sweep};
use crate::config::Config;
use crate::error::{CliError, ConfigError};
use crate::output::{num, opt, RunOutput, Table, NA};
use crate::params::{Point, Topology};

const AXES: &[&str] = &["eta", "eta1", "eta2", "p", "p1", "p2", "eps", "lambda1", "lambda2", "eps_c", "x", "y", "eps_l1", "eps_l2"];

const COLUMNS: &[&str] = &[
    "epsilon_ps_inv",
    "eps_hat_ps_inv",
    "v_ps_inv",
    "temperature_ps_inv",
    "gamma_exact_ps_inv",
    "tail_ps_inv",
    "tail_error_ps_inv",
    "horizon_tau_dimensionless",
    "x_ls_ps_inv",
    "gamma_marcus_gen_ps_inv",
    "gamma_marcus_std_ps_inv",
    "gamma_marcus_classic_ps_inv",
    "gamma_high_temp_ps_inv",
    "marcus_bound_ps_inv",
    "marcus_rel_dev",
    "p_inf",
    "regime_marcus",
    "regime_high_temp",
    "status",
];

/// Exact rate with its failure mode kept as data.
enum Exact {
    Ok { gamma: f64, tail: f64, tail_error: f64, horizon: f64, lamb: f64 },
    Divergent,
    NonConvergence(String),
}

fn exact(pt: &Point, sweep: &Sweep) -> Result<Exact, CliError> {
    let k = sweep.pool.kernels(pt)?;
    let r = match gamma_exact(&pt.dimer, &pt.model, &k) {
        Ok(r) => r,
        Err(CoreError::NonConvergence(m)) => return Ok(Exact::NonConvergence(m)),
        Err(e) => return Err(e.into()),
    };
    if r.is_divergent() {
        return Ok(Exact::Divergent);
    }
    let lamb = match lamb_shift(&pt.dimer, &pt.model, &k) {
        Ok(l) => l,
        Err(CoreError::NonConvergence(m)) => return Ok(Exact::NonConvergence(m)),
        Err(e) => return Err(e.into()),
    };
    Ok(Exact::Ok { gamma: r.gamma, tail: r.tail_contribution, tail_error: r.tail_error, horizon: r.horizon, lamb })
}

/// Closed forms are `NA` outside their domain.
fn closed<T>(r: Result<T, CoreError>) -> Option<T> {
    r.ok()
}

fn row(i: usize, pt: &Point, sweep: &Sweep, thr: f64) -> Result<(Vec<String>, Option<String>), CliError> {
    let (dimer, model, s) = (&pt.dimer, &pt.model, &pt.scalars);
    let ex = exact(pt, sweep)?;
    let gen = closed(gamma_marcus_generalized(dimer, s)).map(|r| r.gamma);
    let [e1, e2] = s.eps_rec();
    let std = closed(gamma_marcus_standard(dimer, 0.5 * (e1 + e2)));
    let high = closed(gamma_high_temp_partial(dimer, model, s)).map(|r| r.gamma);
    let bound = match model {
        SpectralModel::Collective(d) => Some(marcus_upper_bound(dimer.v, d.omega_c)),
        SpectralModel::Local(..) => None,
    };
    let marcus = overall(&reclassify(&check_marcus_regime(dimer, model, s), thr));
    let high_regime = overall(&reclassify(&check_high_temp_partial_regime(dimer, model, s), thr));

    let mut cells = point_cells(i, pt);
    cells.extend([num(dimer.epsilon), num(s.epsilon_hat), num(dimer.v), num(dimer.temperature())]);
    let (status, failure) = match &ex {
        Exact::Ok { gamma, tail, tail_error, horizon, lamb } => {
            cells.extend([num(*gamma), num(*tail), num(*tail_error), num(*horizon), num(*lamb)]);
            ("ok".to_string(), None)
        }
        Exact::Divergent => {
            cells.extend(std::iter::repeat_n(NA.to_string(), 5));
            ("divergent".to_string(), None)
        }
        Exact::NonConvergence(m) => {
            cells.extend(std::iter::repeat_n(NA.to_string(), 5));
            ("non_convergence".to_string(), Some(format!("point {i}: {m}")))
        }
    };
    let rel = match (&ex, gen) {
        (Exact::Ok { gamma, .. }, Some(g)) if *gamma != 0.0 => Some((g - gamma) / gamma),
        _ => None,
    };
    cells.extend([
        opt(gen),
        opt(std.as_ref().map(|m| m.symmetric.gamma)),
        opt(std.as_ref().map(|m| m.classic.gamma)),
        opt(high),
        opt(bound),
        opt(rel),
        num(equilibrium_population(dimer, s)),
        marcus.to_string(),
        high_regime.to_string(),
        status,
    ]);
    Ok((cells, failure))
}

/// Standard Marcus rate along equal reorganization energies, with the
/// exact rate on the same line.
fn marcus_curve(cfg: &mut Config, sweep: &Sweep) -> Result<Option<Table>, CliError> {
    cfg.set_default("output.marcus_curve", Value::Boolean(false));
    if !cfg.bool("output.marcus_curve")?.unwrap_or(false) {
        return Ok(None);
    }
    cfg.set_default("output.marcus_curve_points", Value::Integer(101));
    let n = cfg.usize("output.marcus_curve_points")?.unwrap_or(101);
    if n < 2 {
        return Err(cfg.error("output.marcus_curve_points", "need at least 2 points").into());
    }
    let axis_name = match sweep.setup.topology {
        Topology::Collective => "y",
        Topology::Local => "eps_l1",
    };
    let axis = sweep.grid.axes.iter().find(|a| a.name == axis_name).ok_or_else(|| {
        ConfigError::at_key("output.marcus_curve", format!("the curve follows the {axis_name} axis, which is not swept"))
    })?;
    let lo = axis.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = axis.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // other axes sit at their first value
    let others: Vec<(&str, f64)> = sweep
        .grid
        .axes
        .iter()
        .filter(|a| !matches!(a.name.as_str(), "x" | "y" | "eps_l1" | "eps_l2" | "eps_c"))
        .map(|a| (a.name.as_str(), a.values[0]))
        .collect();
    let base = sweep.setup.with_axes(&others)?;
    let line: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let rows: Vec<Vec<String>> = line
        .par_iter()
        .map(|&e| -> Result<Vec<String>, CliError> {
            let s = match sweep.setup.topology {
                Topology::Collective => base.with_axes(&[("x", 0.0), ("y", e)])?,
                Topology::Local => base.with_axes(&[("eps_l1", e), ("eps_l2", e)])?,
            };
            let pt = s.build()?;
            let std = closed(gamma_marcus_standard(&pt.dimer, pt.scalars.eps_rec()[0]));
            let (g, status) = match exact(&pt, sweep)? {
                Exact::Ok { gamma, .. } => (Some(gamma), "ok"),
                Exact::Divergent => (None, "divergent"),
                Exact::NonConvergence(_) => (None, "non_convergence"),
            };
            Ok(vec![
                num(e),
                opt(std.as_ref().map(|m| m.symmetric.gamma)),
                opt(std.as_ref().map(|m| m.classic.gamma)),
                opt(g),
                status.to_string(),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(
        "marcus_curve.csv",
        ["eps_rec_dimensionless", "gamma_marcus_std_ps_inv", "gamma_marcus_classic_ps_inv", "gamma_exact_ps_inv", "status"]
            .map(String::from)
            .to_vec(),
    );
    rows.into_iter().for_each(|r| t.push(r));
    Ok(Some(t))
}

pub(super) fn run(cfg: &mut Config) -> Result<CommandOutput, CliError> {
    let thr = threshold(cfg)?;
    let sweep = Sweep::from_config(cfg, AXES)?;
    if sweep.setup.bias.is_none() {
        return Err(ConfigError::at_key("dimer.epsilon_mev", "rates need a bias: dimer.epsilon_* or dimer.eps").into());
    }
    let curve = marcus_curve(cfg, &sweep)?;
    let rows = sweep.map(|i, pt| row(i, &pt, &sweep, thr))?;
    let mut table = Table::new("rates.csv", header(COLUMNS));
    let mut failures = Vec::new();
    for (cells, failure) in rows {
        table.push(cells);
        failures.extend(failure);
    }
    let deferred = (!failures.is_empty()).then(|| {
        CliError::NonConvergence(format!("{} grid point(s) did not converge; first: {}", failures.len(), failures[0]))
    });
    let mut tables = vec![table];
    tables.extend(curve);
    Ok(CommandOutput { output: RunOutput { tables, report: None }, deferred })
}
