use dimerdyn_core::coupling::CouplingProfile;
use dimerdyn_core::dynamics::gamma_infinity;

use super::{header, point_cells, Sweep};
use crate::config::Config;
use crate::error::{CliError, ConfigError};
use crate::output::{num, opt, RunOutput, Table};

const AXES: &[&str] = &[
    "eta", "eta1", "eta2", "p", "p1", "p2", "eps", "lambda1", "lambda2", "eps_c", "x", "y", "eps_l1", "eps_l2", "tau",
    "t_ps",
];

const COLUMNS: &[&str] = &[
    "tau_dimensionless",
    "t_ps",
    "q1_site1_dimensionless",
    "q2_site1_dimensionless",
    "q1_site2_dimensionless",
    "q2_site2_dimensionless",
    "gamma_tau_dimensionless",
    "exp_minus_gamma",
    "d_phase_rad",
    "gamma_inf_dimensionless",
    "exp_minus_gamma_inf",
];

/// Kernels `𝒬₁`, `𝒬₂` and the `V = 0` decoherence exponent on a time grid.
pub(super) fn run(cfg: &mut Config) -> Result<RunOutput, CliError> {
    let sweep = Sweep::from_config(cfg, AXES)?;
    let times = sweep
        .times_ps()
        .ok_or_else(|| ConfigError::at_key("sweep.tau", "decoherence needs a time axis (sweep.tau or sweep.t_ps)"))?;
    let beta = sweep.setup.beta;
    let blocks = sweep.map(|i, pt| {
        let k = sweep.pool.kernels(&pt)?;
        let profile = CouplingProfile::new(&pt.dimer, &pt.model, &k)?;
        let g_inf = gamma_infinity(&profile)?;
        let collective = pt.model.is_collective();
        let mut rows = Vec::with_capacity(times.len());
        for &t in &times {
            let tau = t / beta;
            let (q1a, q2a) = k.site(0).eval(tau)?;
            let site2 = if collective { None } else { Some(k.site(1).eval(tau)?) };
            let v = profile.values(tau)?;
            let mut cells = point_cells(i, &pt);
            cells.extend([
                num(tau),
                num(t),
                num(q1a),
                num(q2a),
                opt(site2.map(|q| q.0)),
                opt(site2.map(|q| q.1)),
                num(v.damping),
                num((-v.damping).exp()),
                num(-v.coherence_phase),
                opt(g_inf.value()),
                num(g_inf.saturation()),
            ]);
            rows.push(cells);
        }
        Ok(rows)
    })?;
    let mut table = Table::new("decoherence.csv", header(COLUMNS));
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(RunOutput { tables: vec![table], report: None })
}
