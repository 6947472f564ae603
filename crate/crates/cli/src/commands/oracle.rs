use std::f64::consts::PI;
use std::fmt::Write as _;

use dimerdyn_core::kernels::KernelSet;
use dimerdyn_core::noise_oracle::{simulate_dephasing, NoiseSimConfig, DEFAULT_FREQUENCY_NODES};
use dimerdyn_core::spectral::SpectralModel;
use toml::Value;

use crate::config::Config;
use crate::error::{CliError, ConfigError};
use crate::output::{num, opt, RunOutput, Table};
use crate::params::{Setup, Topology};

const COLUMNS: &[&str] = &[
    "tau_dimensionless",
    "t_ps",
    "mean_re",
    "mean_im",
    "std_err_re",
    "std_err_im",
    "target",
    "z_re",
    "z_im",
    "within_tolerance",
];

fn z(dev: f64, se: f64) -> Option<f64> {
    (se > 0.0).then(|| dev / se)
}

/// Monte-Carlo estimate of the `V = 0` dephasing factor against
/// `exp(-(4λ²/π) Q₂(t))`.
pub(super) fn run(cfg: &mut Config) -> Result<RunOutput, CliError> {
    let setup = Setup::from_config(cfg)?;
    if setup.topology != Topology::Collective {
        return Err(cfg.error("model.topology", "the noise oracle models a collective bath").into());
    }
    if let Some(k) = cfg.keys().find(|k| k.starts_with("sweep.")) {
        return Err(cfg.error(k, "the oracle has its own time grid (oracle.dt, oracle.t_max)").into());
    }
    let pt = setup.build()?;
    let SpectralModel::Collective(density) = pt.model else { unreachable!("collective topology") };
    let beta = setup.beta;
    let eta = density.eta(beta);

    let lambda = match (cfg.f64("oracle.lambda")?, cfg.f64("oracle.y")?) {
        (Some(_), Some(_)) => return Err(cfg.error("oracle.y", "give either oracle.lambda or oracle.y").into()),
        (Some(l), None) => l,
        // y = (ε^c₁ + ε^c₂)/2 in units of T for λ₁ = -λ₂ = λ
        (None, Some(y)) if y >= 0.0 => (PI * y / (4.0 * beta * density.nu())).sqrt(),
        (None, Some(_)) => return Err(cfg.error("oracle.y", "oracle.y must be non-negative").into()),
        (None, None) => return Err(ConfigError::at_key("oracle.lambda", "missing coupling (oracle.lambda or oracle.y)").into()),
    };
    cfg.set_default("oracle.n_paths", Value::Integer(10_000));
    cfg.set_default("oracle.dt", Value::Float(0.1 * 1.0f64.min(1.0 / eta)));
    cfg.set_default("oracle.t_max", Value::Float(5.0 / eta));
    cfg.set_default("oracle.frequency_nodes", Value::Integer(DEFAULT_FREQUENCY_NODES as i64));
    cfg.set_default("oracle.seed", Value::Integer(0));
    cfg.set_default("tolerances.oracle_sigma", Value::Float(3.0));
    let n_paths = cfg.usize("oracle.n_paths")?.unwrap_or(10_000);
    let dt = cfg.require_f64("oracle.dt")?;
    let t_max = cfg.require_f64("oracle.t_max")?;
    let seed = cfg.u64("oracle.seed")?.unwrap_or(0);
    let sigma = cfg.require_f64("tolerances.oracle_sigma")?;

    let mut sim = NoiseSimConfig::new(density, beta, lambda, n_paths, dt, t_max, seed);
    sim.frequency_nodes = cfg.usize("oracle.frequency_nodes")?.unwrap_or(DEFAULT_FREQUENCY_NODES);
    let est = simulate_dephasing(&sim)?;
    let kernels = KernelSet::new(density, beta, setup.method)?;

    let mut table = Table::new("oracle.csv", COLUMNS.iter().map(|s| s.to_string()).collect());
    let mut within = 0usize;
    for (j, &tau) in est.tau.iter().enumerate() {
        let t = tau * beta;
        let target = (-(4.0 * lambda * lambda / PI) * kernels.q2_physical(t)?).exp();
        let m = est.mean[j];
        let (se_re, se_im) = (est.std_err_re[j], est.std_err_im[j]);
        let ok = (m.re - target).abs() <= sigma * se_re && m.im.abs() <= sigma * se_im
            || (m.re - target).abs() <= 1e-12 && m.im.abs() <= 1e-12;
        within += usize::from(ok);
        table.push(vec![
            num(tau),
            num(t),
            num(m.re),
            num(m.im),
            num(se_re),
            num(se_im),
            num(target),
            opt(z(m.re - target, se_re)),
            opt(z(m.im, se_im)),
            ok.to_string(),
        ]);
    }
    let n = est.tau.len();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "noise oracle: p = {}, eta = {eta:.4}, lambda = {lambda:.6}, {n_paths} paths, seed {seed}",
        density.p
    );
    let _ = writeln!(
        text,
        "{within} of {n} grid points within {sigma} standard errors ({:.2}%)",
        100.0 * within as f64 / n as f64
    );
    Ok(RunOutput { tables: vec![table], report: Some(("oracle.txt".into(), text)) })
}
