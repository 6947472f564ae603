use dimerdyn_core::coupling::CouplingProfile;
use dimerdyn_core::dynamics::{coherence_trajectory, equilibrium_population, fit_log_slope, population_trajectory, CoherenceMode};
use dimerdyn_core::rates::{gamma_exact, lamb_shift};
use num_complex::Complex64;
use toml::Value;

use super::{header, point_cells, Sweep};
use crate::config::Config;
use crate::error::{CliError, ConfigError};
use crate::output::{num, opt, RunOutput, Table};

const AXES: &[&str] = &[
    "eta", "eta1", "eta2", "p", "p1", "p2", "eps", "lambda1", "lambda2", "eps_c", "x", "y", "eps_l1", "eps_l2", "tau",
    "t_ps",
];

const COLUMNS: &[&str] = &[
    "t_ps",
    "tau_dimensionless",
    "p",
    "q",
    "rho12_abs",
    "rho12_phase_rad",
    "envelope",
    "d_abs",
    "gamma_tau_dimensionless",
];

const SUMMARY: &[&str] = &[
    "mode",
    "gamma_ps_inv",
    "x_ls_ps_inv",
    "p_inf",
    "half_life_ps",
    "gamma_fit_ps_inv",
    "envelope_slope_ps_inv",
    "gamma_inf_dimensionless",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Auto,
    Fixed(CoherenceMode),
}

struct Initial {
    p0: f64,
    rho12: Complex64,
    mode: Mode,
}

fn initial(cfg: &mut Config) -> Result<Initial, ConfigError> {
    cfg.set_default("dynamics.p0", Value::Float(0.5));
    cfg.set_default("dynamics.rho12_re", Value::Float(0.5));
    cfg.set_default("dynamics.rho12_im", Value::Float(0.0));
    cfg.set_default("dynamics.mode", Value::String("auto".into()));
    let p0 = cfg.require_f64("dynamics.p0")?;
    if !(0.0..=1.0).contains(&p0) {
        return Err(cfg.error("dynamics.p0", "initial population must lie in [0, 1]"));
    }
    let rho12 = Complex64::new(cfg.require_f64("dynamics.rho12_re")?, cfg.require_f64("dynamics.rho12_im")?);
    if rho12.norm_sqr() > p0 * (1.0 - p0) * (1.0 + 1e-12) {
        return Err(cfg.error("dynamics.rho12_re", "initial state is not positive: |rho12|^2 > p0 (1 - p0)"));
    }
    let mode = match cfg.str("dynamics.mode")?.unwrap_or("auto") {
        "auto" => Mode::Auto,
        "main_term" => Mode::Fixed(CoherenceMode::MainTerm),
        "exact_uncoupled" => Mode::Fixed(CoherenceMode::ExactUncoupled),
        other => {
            return Err(cfg.error("dynamics.mode", format!("mode must be auto, main_term or exact_uncoupled, got {other:?}")))
        }
    };
    Ok(Initial { p0, rho12, mode })
}

/// Population and coherence trajectories with a per-point summary.
pub(super) fn run(cfg: &mut Config) -> Result<RunOutput, CliError> {
    let init = initial(cfg)?;
    let sweep = Sweep::from_config(cfg, AXES)?;
    let times =
        sweep.times_ps().ok_or_else(|| ConfigError::at_key("sweep.t_ps", "dynamics needs a time axis (sweep.t_ps or sweep.tau)"))?;
    if sweep.setup.bias.is_none() && sweep.setup.v != 0.0 {
        return Err(ConfigError::at_key("dimer.epsilon_mev", "dynamics with V != 0 needs a bias: dimer.epsilon_* or dimer.eps").into());
    }
    let beta = sweep.setup.beta;
    let blocks = sweep.map(|i, pt| {
        let k = sweep.pool.kernels(&pt)?;
        let profile = CouplingProfile::new(&pt.dimer, &pt.model, &k)?;
        let uncoupled = pt.dimer.v == 0.0;
        let mode = match init.mode {
            Mode::Auto if uncoupled => CoherenceMode::ExactUncoupled,
            Mode::Auto => CoherenceMode::MainTerm,
            Mode::Fixed(m) => m,
        };
        let (gamma, lamb) = if uncoupled {
            (0.0, 0.0)
        } else {
            let r = gamma_exact(&pt.dimer, &pt.model, &k)?;
            if r.is_divergent() {
                return Err(CliError::Degenerate(format!(
                    "point {i}: the rate integral diverges at zero effective bias"
                )));
            }
            (r.gamma, lamb_shift(&pt.dimer, &pt.model, &k)?)
        };
        let pop = population_trajectory(&pt.dimer, &pt.scalars, gamma, init.p0, &times)?;
        let coh = coherence_trajectory(&pt.dimer, &pt.scalars, &profile, gamma, lamb, init.rho12, &times, mode)?;
        let p_inf = equilibrium_population(&pt.dimer, &pt.scalars);

        let mut rows = Vec::with_capacity(times.len());
        for (j, &t) in times.iter().enumerate() {
            let mut cells = point_cells(i, &pt);
            cells.extend([
                num(t),
                num(t / beta),
                num(pop.p[j]),
                num(1.0 - pop.p[j]),
                num(coh.rho12_abs[j]),
                num(coh.rho12_phase[j]),
                num(pop.envelope[j]),
                num(coh.d_factor[j]),
                num(coh.gamma_of_tau[j]),
            ]);
            rows.push(cells);
        }
        let deviation: Vec<f64> = pop.p.iter().map(|p| (p - p_inf).abs()).collect();
        let fit = fit_log_slope(&times, &deviation).map(|s| -s);
        let env_slope = fit_log_slope(&times, &pop.envelope);
        let mut summary = point_cells(i, &pt);
        summary.extend([
            match mode {
                CoherenceMode::MainTerm => "main_term".to_string(),
                CoherenceMode::ExactUncoupled => "exact_uncoupled".to_string(),
            },
            num(gamma),
            num(lamb),
            num(p_inf),
            opt((gamma > 0.0).then(|| std::f64::consts::LN_2 / gamma)),
            opt(fit.filter(|_| gamma > 0.0)),
            opt(env_slope),
            opt(profile.gamma_infinity()?),
        ]);
        Ok((rows, summary))
    })?;
    let mut traj = Table::new("trajectory.csv", header(COLUMNS));
    let mut summary = Table::new("summary.csv", header(SUMMARY));
    for (rows, s) in blocks {
        rows.into_iter().for_each(|r| traj.push(r));
        summary.push(s);
    }
    Ok(RunOutput { tables: vec![traj, summary], report: None })
}
