//! Physical parameters of one grid point, resolved from the config and the
//! sweep axes.
//!
//! Couplings are given either directly (`dimer.lambda1`, `dimer.lambda2`) or
//! through reorganization energies in units of the temperature: `reorg.x`,
//! `reorg.y` on a collective bath, `reorg.eps_l1`, `reorg.eps_l2` on local
//! baths. The bias is `dimer.epsilon_*` or the dimensionless `dimer.eps`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use dimerdyn_core::kernels::{KernelMethod, KernelSet, ModelKernels};
use dimerdyn_core::spectral::{
    derive_scalars, from_dimensionless, to_dimensionless, DerivedScalars, DimensionlessParams, DimerParams,
    SpectralDensity, SpectralModel,
};
use toml::Value;

use crate::config::Config;
use crate::error::{CliError, ConfigError};

const ENERGIES: &[&str] = &["dimer.temperature", "dimer.epsilon", "dimer.v"];
const BATH_FIELDS: &[&str] = &["p", "eta", "a_p"];
const BATH_ENERGIES: &[&str] = &["omega_c", "nu"];

/// Keys read by [`Setup::from_config`].
pub fn is_parameter_key(key: &str) -> bool {
    let energy = |base: &str| key == format!("{base}_mev") || key == format!("{base}_ps_inv");
    if ENERGIES.iter().any(|b| energy(b)) {
        return true;
    }
    if matches!(
        key,
        "model.topology"
            | "model.kernel_method"
            | "dimer.eps"
            | "dimer.lambda1"
            | "dimer.lambda2"
            | "reorg.x"
            | "reorg.y"
            | "reorg.eps_l1"
            | "reorg.eps_l2"
    ) {
        return true;
    }
    ["bath", "bath1", "bath2"].iter().any(|sec| {
        BATH_FIELDS.iter().any(|f| key == format!("{sec}.{f}"))
            || BATH_ENERGIES.iter().any(|f| energy(&format!("{sec}.{f}")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Collective,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cutoff {
    /// `βω_c`
    Eta(f64),
    OmegaC(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Strength {
    Nu(f64),
    Amplitude(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bath {
    /// `None` until given by the config or a sweep axis.
    p: Option<f64>,
    cutoff: Option<Cutoff>,
    strength: Strength,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Couplings {
    Lambda([f64; 2]),
    /// `x = (ε^c₁ - ε^c₂)/2`, `y = (ε^c₁ + ε^c₂)/2`.
    Collective { x: f64, y: f64 },
    Local([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bias {
    Physical(f64),
    /// `βε`
    Dimensionless(f64),
}

/// Base parameters before sweep overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub topology: Topology,
    pub method: KernelMethod,
    pub beta: f64,
    pub bias: Option<Bias>,
    pub v: f64,
    baths: [Bath; 2],
    pub couplings: Couplings,
}

/// Fully resolved parameters at one grid point.
#[derive(Debug, Clone)]
pub struct Point {
    pub dimer: DimerParams,
    pub model: SpectralModel,
    pub scalars: DerivedScalars,
    pub dimensionless: DimensionlessParams,
}

impl Point {
    pub fn eta(&self) -> [f64; 2] {
        self.dimensionless.eta
    }

    pub fn p(&self) -> [f64; 2] {
        self.dimensionless.p
    }
}

/// Bath fields looked up in `secs` in order, so `bath1.eta` overrides
/// `bath.eta`.
fn bath_from_config(cfg: &Config, secs: &[&str]) -> Result<Bath, ConfigError> {
    let mut p = None;
    for sec in secs {
        if let Some(v) = cfg.f64(&format!("{sec}.p"))? {
            p = Some(v);
            break;
        }
    }
    // the most specific section that sets a cutoff or strength decides its form
    let cutoff = secs
        .iter()
        .find_map(|sec| match (cfg.f64(&format!("{sec}.eta")), cfg.energy(&format!("{sec}.omega_c"))) {
            (Ok(None), Ok(None)) => None,
            (Ok(Some(_)), Ok(Some(_))) => {
                Some(Err(cfg.error(&format!("{sec}.eta"), format!("give either {sec}.eta or {sec}.omega_c_*"))))
            }
            (Ok(Some(e)), Ok(None)) => Some(Ok(Cutoff::Eta(e))),
            (Ok(None), Ok(Some(w))) => Some(Ok(Cutoff::OmegaC(w))),
            (Err(e), _) | (_, Err(e)) => Some(Err(e)),
        })
        .transpose()?;
    let strength = secs
        .iter()
        .find_map(|sec| match (cfg.energy(&format!("{sec}.nu")), cfg.f64(&format!("{sec}.a_p"))) {
            (Ok(None), Ok(None)) => None,
            (Ok(Some(_)), Ok(Some(_))) => {
                Some(Err(cfg.error(&format!("{sec}.a_p"), format!("give either {sec}.nu_* or {sec}.a_p"))))
            }
            (Ok(Some(n)), Ok(None)) => Some(Ok(Strength::Nu(n))),
            (Ok(None), Ok(Some(a))) => Some(Ok(Strength::Amplitude(a))),
            (Err(e), _) | (_, Err(e)) => Some(Err(e)),
        })
        .unwrap_or(Ok(Strength::Nu(1.0)))?;
    Ok(Bath { p, cutoff, strength })
}

fn has_section(cfg: &Config, sec: &str) -> bool {
    let prefix = format!("{sec}.");
    cfg.keys().any(|k| k.starts_with(&prefix))
}

impl Setup {
    /// Reads the parameter keys, inserting defaults into `cfg` so that the
    /// manifest records them.
    pub fn from_config(cfg: &mut Config) -> Result<Self, ConfigError> {
        cfg.set_default("model.topology", Value::String("collective".into()));
        cfg.set_default("model.kernel_method", Value::String("closed_form".into()));
        if cfg.energy("dimer.v")?.is_none() {
            cfg.set("dimer.v_ps_inv", Value::Float(0.0));
        }
        let topology = match cfg.str("model.topology")?.unwrap_or_default() {
            "collective" => Topology::Collective,
            "local" => Topology::Local,
            other => {
                return Err(cfg.error("model.topology", format!("topology must be collective or local, got {other:?}")))
            }
        };
        let method = match cfg.str("model.kernel_method")?.unwrap_or_default() {
            "closed_form" => KernelMethod::ClosedForm,
            "quadrature" => KernelMethod::Quadrature,
            other => {
                return Err(cfg.error(
                    "model.kernel_method",
                    format!("kernel method must be closed_form or quadrature, got {other:?}"),
                ))
            }
        };
        let temperature = cfg.require_energy("dimer.temperature")?;
        if !(temperature > 0.0) {
            return Err(cfg.error("dimer.temperature_mev", "temperature must be positive"));
        }
        let bias = match (cfg.energy("dimer.epsilon")?, cfg.f64("dimer.eps")?) {
            (Some(_), Some(_)) => return Err(cfg.error("dimer.eps", "give either dimer.epsilon_* or dimer.eps")),
            (Some(e), None) => Some(Bias::Physical(e)),
            (None, Some(e)) => Some(Bias::Dimensionless(e)),
            (None, None) => None,
        };
        let v = cfg.require_energy("dimer.v")?;

        let sections: &[&str] =
            if has_section(cfg, "bath1") && !has_section(cfg, "bath") { &["bath1", "bath2"] } else { &["bath"] };
        for sec in sections {
            let keys = [format!("{sec}.nu_mev"), format!("{sec}.nu_ps_inv"), format!("{sec}.a_p")];
            if !keys.iter().any(|k| cfg.contains(k)) {
                cfg.set(&keys[1], Value::Float(1.0));
            }
        }
        let baths = match topology {
            Topology::Collective => {
                for sec in ["bath1", "bath2"] {
                    if let Some(k) = cfg.keys().find(|k| k.starts_with(&format!("{sec}."))) {
                        return Err(cfg.error(k, "per-site baths need model.topology = \"local\""));
                    }
                }
                let b = bath_from_config(cfg, &["bath"])?;
                [b, b]
            }
            Topology::Local => [bath_from_config(cfg, &["bath1", "bath"])?, bath_from_config(cfg, &["bath2", "bath"])?],
        };

        let lambda = (cfg.f64("dimer.lambda1")?, cfg.f64("dimer.lambda2")?);
        let xy = (cfg.f64("reorg.x")?, cfg.f64("reorg.y")?);
        let loc = (cfg.f64("reorg.eps_l1")?, cfg.f64("reorg.eps_l2")?);
        let given = |pair: (Option<f64>, Option<f64>)| pair.0.is_some() || pair.1.is_some();
        let styles = [given(lambda), given(xy), given(loc)].iter().filter(|b| **b).count();
        if styles > 1 {
            return Err(ConfigError::at_key(
                "reorg",
                "give the couplings one way: dimer.lambda1/2, reorg.x/y or reorg.eps_l1/2",
            ));
        }
        let couplings = if given(xy) {
            if topology != Topology::Collective {
                return Err(cfg.error("reorg.x", "reorg.x and reorg.y describe a collective bath"));
            }
            Couplings::Collective { x: xy.0.unwrap_or(0.0), y: xy.1.unwrap_or(0.0) }
        } else if given(loc) {
            if topology != Topology::Local {
                return Err(cfg.error("reorg.eps_l1", "reorg.eps_l1 and reorg.eps_l2 describe local baths"));
            }
            Couplings::Local([loc.0.unwrap_or(0.0), loc.1.unwrap_or(0.0)])
        } else {
            Couplings::Lambda([lambda.0.unwrap_or(0.0), lambda.1.unwrap_or(0.0)])
        };
        Ok(Self { topology, method, beta: 1.0 / temperature, bias, v, baths, couplings })
    }

    /// Copy with one sweep axis applied.
    pub fn with_axis(&self, axis: &str, value: f64) -> Result<Self, ConfigError> {
        let mut s = self.clone();
        let coll = |s: &Self| match s.couplings {
            Couplings::Collective { x, y } => Ok((x, y)),
            _ if s.topology == Topology::Collective => Ok((0.0, 0.0)),
            _ => Err(ConfigError::at_key(format!("sweep.{axis}"), "axis needs model.topology = \"collective\"")),
        };
        let local = |s: &Self| match s.couplings {
            Couplings::Local(e) => Ok(e),
            _ if s.topology == Topology::Local => Ok([0.0, 0.0]),
            _ => Err(ConfigError::at_key(format!("sweep.{axis}"), "axis needs model.topology = \"local\"")),
        };
        let lambda = |s: &Self| match s.couplings {
            Couplings::Lambda(l) => Ok(l),
            _ => Err(ConfigError::at_key(format!("sweep.{axis}"), "lambda axes need couplings given as dimer.lambda*")),
        };
        match axis {
            "eta" => s.baths.iter_mut().for_each(|b| b.cutoff = Some(Cutoff::Eta(value))),
            "eta1" => s.baths[0].cutoff = Some(Cutoff::Eta(value)),
            "eta2" => s.baths[1].cutoff = Some(Cutoff::Eta(value)),
            "p" => s.baths.iter_mut().for_each(|b| b.p = Some(value)),
            "p1" => s.baths[0].p = Some(value),
            "p2" => s.baths[1].p = Some(value),
            "eps" => s.bias = Some(Bias::Dimensionless(value)),
            "lambda1" => s.couplings = Couplings::Lambda([value, lambda(&s)?[1]]),
            "lambda2" => s.couplings = Couplings::Lambda([lambda(&s)?[0], value]),
            "eps_c" => {
                coll(&s)?;
                s.couplings = Couplings::Collective { x: 0.0, y: value }
            }
            "x" => s.couplings = Couplings::Collective { x: value, y: coll(&s)?.1 },
            "y" => s.couplings = Couplings::Collective { x: coll(&s)?.0, y: value },
            "eps_l1" => s.couplings = Couplings::Local([value, local(&s)?[1]]),
            "eps_l2" => s.couplings = Couplings::Local([local(&s)?[0], value]),
            other => return Err(ConfigError::at_key(format!("sweep.{other}"), "not a parameter axis")),
        }
        if matches!(axis, "eta1" | "eta2" | "p1" | "p2") && s.topology == Topology::Collective {
            return Err(ConfigError::at_key(format!("sweep.{axis}"), "per-site axes need model.topology = \"local\""));
        }
        Ok(s)
    }

    pub fn with_axes(&self, values: &[(&str, f64)]) -> Result<Self, ConfigError> {
        values.iter().try_fold(self.clone(), |s, (a, v)| s.with_axis(a, *v))
    }

    fn density(&self, j: usize) -> Result<SpectralDensity, CliError> {
        let b = &self.baths[j];
        let sec = match self.topology {
            Topology::Collective => "bath".to_string(),
            Topology::Local => format!("bath{}", j + 1),
        };
        let p = b.p.ok_or_else(|| ConfigError::at_key(format!("{sec}.p"), "missing infrared exponent"))?;
        let omega_c = match b.cutoff {
            Some(Cutoff::Eta(e)) => e / self.beta,
            Some(Cutoff::OmegaC(w)) => w,
            None => return Err(ConfigError::at_key(format!("{sec}.eta"), "missing cutoff (eta or omega_c_*)").into()),
        };
        Ok(match b.strength {
            Strength::Nu(nu) => SpectralDensity::with_nu(p, omega_c, nu)?,
            Strength::Amplitude(a) => SpectralDensity::new(p, omega_c, a)?,
        })
    }

    /// `ε` in ps⁻¹; zero when no bias was given.
    pub fn epsilon(&self) -> f64 {
        match self.bias {
            Some(Bias::Physical(e)) => e,
            Some(Bias::Dimensionless(e)) => e / self.beta,
            None => 0.0,
        }
    }

    pub fn build(&self) -> Result<Point, CliError> {
        let densities = [self.density(0)?, self.density(1)?];
        let beta = self.beta;
        let (dimer, model) = match self.couplings {
            Couplings::Lambda([l1, l2]) => {
                let model = match self.topology {
                    Topology::Collective => SpectralModel::Collective(densities[0]),
                    Topology::Local => SpectralModel::Local(densities[0], densities[1]),
                };
                (DimerParams::new(self.epsilon(), self.v, l1, l2, beta)?, model)
            }
            Couplings::Collective { x, y } | Couplings::Local([x, y]) => {
                let collective = matches!(self.couplings, Couplings::Collective { .. });
                let d = DimensionlessParams {
                    eps: beta * self.epsilon(),
                    eps_c: collective.then_some([y + x, y - x]),
                    eps_l: if collective { [0.0, 0.0] } else { [x, y] },
                    eta: [beta * densities[0].omega_c, beta * densities[1].omega_c],
                    p: [densities[0].p, densities[1].p],
                };
                let (dimer, model) = from_dimensionless(&d, beta, self.v, [densities[0].nu(), densities[1].nu()])?;
                // keep the requested amplitudes exactly
                let model = match model {
                    SpectralModel::Collective(_) => SpectralModel::Collective(densities[0]),
                    SpectralModel::Local(..) => SpectralModel::Local(densities[0], densities[1]),
                };
                (dimer, model)
            }
        };
        let scalars = derive_scalars(&dimer, &model)?;
        let mut dimensionless = to_dimensionless(&dimer, &model)?;
        // report requested coordinates rather than their round trip
        match self.couplings {
            Couplings::Collective { x, y } => dimensionless.eps_c = Some([y + x, y - x]),
            Couplings::Local(e) => dimensionless.eps_l = e,
            Couplings::Lambda(_) => {}
        }
        if let Some(Bias::Dimensionless(e)) = self.bias {
            dimensionless.eps = e;
        }
        for (j, b) in self.baths.iter().enumerate() {
            if let Some(Cutoff::Eta(e)) = b.cutoff {
                dimensionless.eta[j] = e;
            }
        }
        Ok(Point { dimer, model, scalars, dimensionless })
    }
}

/// Kernel sets shared between grid points with the same bath and
/// temperature.
#[derive(Debug)]
pub struct KernelPool {
    method: KernelMethod,
    sets: Mutex<HashMap<[u64; 4], Arc<KernelSet>>>,
}

impl KernelPool {
    pub fn new(method: KernelMethod) -> Self {
        Self { method, sets: Mutex::default() }
    }

    fn set(&self, d: &SpectralDensity, beta: f64) -> Result<Arc<KernelSet>, CliError> {
        let key = [d.p.to_bits(), d.omega_c.to_bits(), d.a_p.to_bits(), beta.to_bits()];
        let mut sets = self.sets.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(s) = sets.get(&key) {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(KernelSet::new(*d, beta, self.method)?);
        sets.insert(key, Arc::clone(&s));
        Ok(s)
    }

    pub fn kernels(&self, point: &Point) -> Result<ModelKernels, CliError> {
        let beta = point.dimer.beta;
        Ok(match &point.model {
            SpectralModel::Collective(d) => {
                let s = self.set(d, beta)?;
                ModelKernels::from_sets([Arc::clone(&s), s], true)
            }
            SpectralModel::Local(d1, d2) => ModelKernels::from_sets([self.set(d1, beta)?, self.set(d2, beta)?], false),
        })
    }
}
