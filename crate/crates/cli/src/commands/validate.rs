use std::fmt::Write as _;

use dimerdyn_core::dynamics::equilibrium_population;
use dimerdyn_core::rates::gamma_exact;
use dimerdyn_core::regimes::{
    check_high_temp_partial_regime, check_marcus_regime, coupling_constraints, usefulness_window, BoundConstants,
    RegimeFlag,
};
use dimerdyn_core::Error as CoreError;
use toml::Value;

use super::{reclassify, threshold, Sweep};
use crate::config::Config;
use crate::error::CliError;
use crate::output::{num, opt, RunOutput, Table, NA};
use crate::params::Point;

const AXES: &[&str] =
    &["eta", "eta1", "eta2", "p", "p1", "p2", "eps", "lambda1", "lambda2", "eps_c", "x", "y", "eps_l1", "eps_l2"];

const COLUMNS: &[&str] = &["point", "check", "name", "value", "small", "large", "ratio", "status"];

pub const SYMMETRIC_ADVISORY: &str =
    "lambda1 = lambda2 on a collective bath: both sites shift together and the relaxation rate vanishes";

struct Settings {
    threshold: f64,
    constants: BoundConstants,
    p0: f64,
}

fn flag_row(i: usize, check: &str, f: &RegimeFlag) -> Vec<String> {
    vec![
        i.to_string(),
        check.into(),
        f.name.clone(),
        NA.into(),
        num(f.small),
        num(f.large),
        num(f.ratio),
        f.status.to_string(),
    ]
}

fn value_row(i: usize, check: &str, name: &str, value: Option<f64>, status: &str) -> Vec<String> {
    vec![i.to_string(), check.into(), name.into(), opt(value), NA.into(), NA.into(), NA.into(), status.into()]
}

fn describe(pt: &Point) -> String {
    let d = &pt.dimensionless;
    let mut s = format!("eps = {:.4}, eta = ({:.4}, {:.4}), p = ({}, {})", d.eps, d.eta[0], d.eta[1], d.p[0], d.p[1]);
    match d.xy() {
        Some((x, y)) => {
            let _ = write!(s, ", x = {x:.4}, y = {y:.4}");
        }
        None => {
            let _ = write!(s, ", eps_l = ({:.4}, {:.4})", d.eps_l[0], d.eps_l[1]);
        }
    }
    s
}

fn check_point(i: usize, pt: &Point, sweep: &Sweep, set: &Settings) -> Result<(Vec<Vec<String>>, String), CliError> {
    let (dimer, model, s) = (&pt.dimer, &pt.model, &pt.scalars);
    let mut rows = Vec::new();
    let mut text = format!("point {i}: {}\n", describe(pt));
    for (check, report) in [
        ("marcus", check_marcus_regime(dimer, model, s)),
        ("high_temp_partial", check_high_temp_partial_regime(dimer, model, s)),
    ] {
        for f in reclassify(&report, set.threshold) {
            let _ = writeln!(text, "  [{check}] {}: {} (ratio {:.3e})", f.name, f.status, f.ratio);
            rows.push(flag_row(i, check, &f));
        }
    }

    if model.is_collective() && dimer.lambda1 == dimer.lambda2 {
        let _ = writeln!(text, "  advisory: {SYMMETRIC_ADVISORY}");
        rows.push(value_row(i, "advisory", "symmetric_coupling", None, "degenerate_rate"));
    }

    // the reduced rate γ/V² is the rate at unit tunnelling element
    let k = sweep.pool.kernels(pt)?;
    let unit = match gamma_exact(&dimer.with_v(1.0), model, &k) {
        Ok(r) if !r.is_divergent() => Some(r.gamma),
        Ok(_) => None,
        Err(CoreError::NonConvergence(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let Some(gamma_tilde) = unit else {
        let _ = writeln!(text, "  coupling bounds and usefulness window unavailable: the rate integral did not converge");
        rows.push(value_row(i, "coupling", "v0_bound", None, "unavailable"));
        rows.push(value_row(i, "usefulness", "window", None, "unavailable"));
        return Ok((rows, text));
    };
    let c = coupling_constraints(dimer, model, s, gamma_tilde.max(0.0), set.constants)?;
    let admits = if c.admits(dimer.v) { "satisfied" } else { "violated" };
    let _ = writeln!(text, "  |V| = {:.4e} against V0 = {:.4e}: {admits}", dimer.v.abs(), c.v0_bound);
    rows.push(vec![
        i.to_string(),
        "coupling".into(),
        "v0_bound".into(),
        num(c.v0_bound),
        num(dimer.v.abs()),
        num(c.v0_bound),
        num(if c.v0_bound > 0.0 { dimer.v.abs() / c.v0_bound } else { f64::INFINITY }),
        admits.into(),
    ]);
    for (name, v) in [
        ("born", c.born),
        ("separation", c.separation),
        ("no_backreaction", c.no_backreaction),
        ("strong_coupling_scale", c.strong_coupling_scale),
        ("gamma_tilde", c.gamma_tilde),
        ("theta", c.theta),
        ("xi", c.xi),
    ] {
        rows.push(value_row(i, "coupling", name, Some(v), "info"));
    }

    let gamma = gamma_tilde.max(0.0) * dimer.v * dimer.v;
    let p_inf = equilibrium_population(dimer, s);
    let w = usefulness_window(set.p0, gamma, set.constants.c, Some(p_inf))?;
    let status = if w.degenerate { "degenerate" } else { "ok" };
    let _ = writeln!(text, "  usefulness window: {:.4e} ps << t << {:.4e} ps ({status})", w.t_min, w.t_max);
    rows.push(value_row(i, "usefulness", "t_min_ps", Some(w.t_min), status));
    rows.push(value_row(i, "usefulness", "t_max_ps", Some(w.t_max), status));
    rows.push(value_row(i, "usefulness", "t_min_equilibrium_ps", w.t_min_equilibrium, status));
    Ok((rows, text))
}

/// Regime flags with margins, coupling bounds and usefulness windows.
pub(super) fn run(cfg: &mut Config) -> Result<RunOutput, CliError> {
    let thr = threshold(cfg)?;
    cfg.set_default("regimes.c_const", Value::Float(1.0));
    cfg.set_default("regimes.decay", Value::Float(1.0));
    cfg.set_default("dynamics.p0", Value::Float(0.5));
    let constants = BoundConstants { c: cfg.f64_or("regimes.c_const", 1.0)?, decay: cfg.f64_or("regimes.decay", 1.0)? };
    let p0 = cfg.f64_or("dynamics.p0", 0.5)?;
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(cfg.error("dynamics.p0", "the usefulness window needs an initial population in (0, 1]").into());
    }
    let set = Settings { threshold: thr, constants, p0 };
    let sweep = Sweep::from_config(cfg, AXES)?;
    let results = sweep.map(|i, pt| check_point(i, &pt, &sweep, &set))?;
    let mut table = Table::new("validate.csv", COLUMNS.iter().map(|s| s.to_string()).collect());
    let mut text = String::new();
    for (rows, t) in results {
        rows.into_iter().for_each(|r| table.push(r));
        text.push_str(&t);
    }
    Ok(RunOutput { tables: vec![table], report: Some(("validate.txt".into(), text)) })
}
