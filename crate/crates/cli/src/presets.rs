//! Named parameter sets for the figure data. Axis ranges not fixed by the
//! physics are tool conventions and end up in every manifest.

use crate::config::Config;
use crate::error::ConfigError;

/// Presets accepted by the `figures` command.
pub const FIGURE_PRESETS: &[&str] = &["fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4", "fig5", "fig6"];

const PHYSICAL: &str = r#"
dimer.temperature_mev = 25.0
dimer.epsilon_ps_inv = 150.0
dimer.v_ps_inv = 25.0
"#;

const COLLECTIVE_SURFACE: &str = r#"
model.topology = "collective"
bath.p = 0.5
sweep.x.min = -4.0
sweep.x.max = 4.0
sweep.x.count = 25
sweep.y.min = 1.0
sweep.y.max = 8.0
sweep.y.count = 25
output.marcus_curve = true
"#;

const LOCAL_SURFACE: &str = r#"
model.topology = "local"
bath.p = 0.5
sweep.eps_l1.min = 0.1
sweep.eps_l1.max = 8.0
sweep.eps_l1.count = 25
sweep.eps_l2.min = 0.1
sweep.eps_l2.max = 8.0
sweep.eps_l2.count = 25
output.marcus_curve = true
"#;

const TAU_ETA_SURFACE: &str = r#"
dimer.temperature_mev = 25.0
bath.p = 0.5
sweep.eta.min = 0.1
sweep.eta.max = 5.0
sweep.eta.count = 50
sweep.tau.min = 0.0
sweep.tau.max = 50.0
sweep.tau.count = 201
"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    /// Command the preset was built for.
    pub command: &'static str,
    parts: &'static [&'static str],
}

const PRESETS: &[Preset] = &[
    Preset { name: "fig1a", command: "rates", parts: &[PHYSICAL, COLLECTIVE_SURFACE, "bath.eta = 0.1\n"] },
    Preset { name: "fig1b", command: "rates", parts: &[PHYSICAL, COLLECTIVE_SURFACE, "bath.eta = 1.0\n"] },
    Preset {
        name: "fig1c",
        command: "rates",
        parts: &[PHYSICAL, COLLECTIVE_SURFACE, "bath.eta = 1.0\nbath.p = -0.25\n"],
    },
    Preset {
        name: "fig1d",
        command: "rates",
        parts: &[
            PHYSICAL,
            r#"
model.topology = "collective"
bath.p = 0.5
bath.eta = 0.1
sweep.eta.values = [0.1, 1.0]
sweep.p.values = [0.5, -0.25]
sweep.eps_c.min = 0.5
sweep.eps_c.max = 8.0
sweep.eps_c.count = 61
"#,
        ],
    },
    Preset {
        name: "fig2",
        command: "decoherence",
        parts: &[r#"
dimer.temperature_mev = 25.0
bath.p = 0.5
bath.eta = 0.1
sweep.eta.values = [0.1, 1.0]
sweep.p.values = [-0.25, -0.499, 0.5, 1.5]
sweep.tau.min = 0.0
sweep.tau.max = 50.0
sweep.tau.count = 201
"#],
    },
    Preset { name: "fig3a", command: "rates", parts: &[PHYSICAL, LOCAL_SURFACE, "bath1.eta = 0.1\nbath2.eta = 0.1\n"] },
    Preset { name: "fig3b", command: "rates", parts: &[PHYSICAL, LOCAL_SURFACE, "bath1.eta = 0.1\nbath2.eta = 1.0\n"] },
    Preset { name: "fig3c", command: "rates", parts: &[PHYSICAL, LOCAL_SURFACE, "bath1.eta = 1.0\nbath2.eta = 0.1\n"] },
    Preset {
        name: "fig3d",
        command: "rates",
        parts: &[PHYSICAL, LOCAL_SURFACE, "bath.p = -0.25\nbath1.eta = 0.1\nbath2.eta = 1.0\n"],
    },
    Preset { name: "fig4", command: "decoherence", parts: &[TAU_ETA_SURFACE, "bath.eta = 0.1\n"] },
    Preset {
        name: "fig5",
        command: "decoherence",
        parts: &[TAU_ETA_SURFACE, "bath.eta = 0.1\nmodel.topology = \"collective\"\nreorg.x = 0.0\nreorg.y = 0.2\n"],
    },
    Preset {
        name: "fig6",
        command: "decoherence",
        parts: &[TAU_ETA_SURFACE, "bath.eta = 0.1\nmodel.topology = \"local\"\nreorg.eps_l1 = 0.1\nreorg.eps_l2 = 0.1\n"],
    },
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    /// Later parts override earlier ones.
    pub fn config(&self) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        for part in self.parts {
            cfg.merge(Config::parse(part, &format!("preset {}", self.name))?);
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in names() {
            let cfg = find(name).unwrap().config().unwrap();
            assert!(cfg.contains("dimer.temperature_mev"), "{name}");
        }
    }

    #[test]
    fn figure_presets_exist() {
        for name in FIGURE_PRESETS {
            assert!(find(name).is_some());
        }
    }
}
