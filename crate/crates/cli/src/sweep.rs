//! Parameter grids: `sweep.<axis>.{min, max, count, scale}` or
//! `sweep.<axis>.values`, combined as a row-major product.

use crate::config::Config;
use crate::error::ConfigError;

/// Axes in their default nesting order, outermost first.
pub const AXES: &[&str] = &[
    "eta", "eta1", "eta2", "p", "p1", "p2", "eps", "lambda1", "lambda2", "eps_c", "x", "y", "eps_l1", "eps_l2",
    "tau", "t_ps",
];

pub const TIME_AXES: &[&str] = &["tau", "t_ps"];

const FIELDS: &[&str] = &["min", "max", "count", "scale", "values"];

pub fn is_sweep_key(key: &str) -> bool {
    if key == "sweep.order" {
        return true;
    }
    let mut parts = key.split('.');
    matches!(
        (parts.next(), parts.next(), parts.next(), parts.next()),
        (Some("sweep"), Some(axis), Some(field), None) if AXES.contains(&axis) && FIELDS.contains(&field)
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    fn from_config(cfg: &Config, name: &str) -> Result<Self, ConfigError> {
        let key = |f: &str| format!("sweep.{name}.{f}");
        if let Some(values) = cfg.f64_list(&key("values"))? {
            for f in ["min", "max", "count", "scale"] {
                if cfg.contains(&key(f)) {
                    return Err(cfg.error(&key(f), format!("{} cannot be combined with {}", key(f), key("values"))));
                }
            }
            return Ok(Self { name: name.to_string(), values });
        }
        let count = cfg.usize(&key("count"))?.ok_or_else(|| ConfigError::at_key(key("count"), "missing sweep count"))?;
        let min = cfg.require_f64(&key("min"))?;
        let max = if count == 1 { cfg.f64_or(&key("max"), min)? } else { cfg.require_f64(&key("max"))? };
        let scale = match cfg.str(&key("scale"))?.unwrap_or("linear") {
            "linear" => Scale::Linear,
            "log" => Scale::Log,
            other => return Err(cfg.error(&key("scale"), format!("scale must be linear or log, got {other:?}"))),
        };
        if scale == Scale::Log && !(min > 0.0 && max > 0.0) {
            return Err(cfg.error(&key("min"), "log scale needs positive bounds"));
        }
        Ok(Self { name: name.to_string(), values: spaced(min, max, count, scale) })
    }
}

fn spaced(min: f64, max: f64, count: usize, scale: Scale) -> Vec<f64> {
    match count {
        0 => return Vec::new(),
        1 => return vec![min],
        _ => {}
    }
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                return max;
            }
            let f = i as f64 / last;
            match scale {
                Scale::Linear => min + f * (max - min),
                Scale::Log => (min.ln() + f * (max.ln() - min.ln())).exp(),
            }
        })
        .collect()
}

/// Row-major product of axes, first axis outermost.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    /// Axes named in the config, restricted to `allowed`.
    pub fn from_config(cfg: &Config, allowed: &[&str]) -> Result<Self, ConfigError> {
        let present: Vec<&str> =
            AXES.iter().copied().filter(|a| FIELDS.iter().any(|f| cfg.contains(&format!("sweep.{a}.{f}")))).collect();
        for a in &present {
            if !allowed.contains(a) {
                let k = FIELDS.iter().map(|f| format!("sweep.{a}.{f}")).find(|k| cfg.contains(k)).unwrap_or_default();
                return Err(cfg.error(&k, format!("axis {a} is not available for this command")));
            }
        }
        let order: Vec<String> = match cfg.str_list("sweep.order")? {
            Some(order) => {
                for name in &order {
                    if !present.contains(&name.as_str()) {
                        return Err(cfg.error("sweep.order", format!("axis {name} has no sweep entries")));
                    }
                }
                if let Some(missing) = present.iter().find(|a| !order.iter().any(|o| o == *a)) {
                    return Err(cfg.error("sweep.order", format!("axis {missing} is swept but missing from the order")));
                }
                order
            }
            None => present.iter().map(|s| s.to_string()).collect(),
        };
        let axes = order.iter().map(|a| Axis::from_config(cfg, a)).collect::<Result<Vec<_>, _>>()?;
        if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
            return Err(ConfigError::at_key(format!("sweep.{}", a.name), "empty grid: the axis has no points"));
        }
        Ok(Self { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    /// Axis values at flat index `i`.
    pub fn point(&self, mut i: usize) -> Vec<(&str, f64)> {
        let mut out = vec![("", 0.0); self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            let n = a.values.len();
            out[k] = (a.name.as_str(), a.values[i % n]);
            i /= n;
        }
        out
    }

    /// Split off the time axis, if any.
    pub fn split_time(mut self) -> Result<(Grid, Option<Axis>), ConfigError> {
        let pos: Vec<usize> =
            self.axes.iter().enumerate().filter(|(_, a)| TIME_AXES.contains(&a.name.as_str())).map(|(i, _)| i).collect();
        match pos.as_slice() {
            [] => Ok((self, None)),
            [i] => {
                let t = self.axes.remove(*i);
                Ok((self, Some(t)))
            }
            _ => Err(ConfigError::at_key("sweep.tau", "give either a tau or a t_ps axis, not both")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(text: &str) -> Result<Grid, ConfigError> {
        Grid::from_config(&Config::parse(text, "t").unwrap(), AXES)
    }

    #[test]
    fn linear_and_log_spacing() {
        assert_eq!(spaced(0.0, 1.0, 5, Scale::Linear), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let v = spaced(0.1, 10.0, 3, Scale::Log);
        assert!((v[1] - 1.0).abs() < 1e-15);
        assert_eq!(v[2], 10.0);
    }

    #[test]
    fn row_major_order() {
        let g = grid("sweep.x.values = [1, 2]\nsweep.y.values = [10, 20, 30]\n").unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.point(0), vec![("x", 1.0), ("y", 10.0)]);
        assert_eq!(g.point(2), vec![("x", 1.0), ("y", 30.0)]);
        assert_eq!(g.point(3), vec![("x", 2.0), ("y", 10.0)]);
        let g = grid("sweep.order = [\"y\", \"x\"]\nsweep.x.values = [1, 2]\nsweep.y.values = [10, 20, 30]\n").unwrap();
        assert_eq!(g.point(1), vec![("y", 10.0), ("x", 2.0)]);
    }

    #[test]
    fn empty_axes_are_errors() {
        assert!(grid("sweep.x.count = 0\nsweep.x.min = 0\nsweep.x.max = 1\n").is_err());
        assert!(grid("sweep.x.values = []\n").is_err());
        assert!(grid("sweep.x.values = [1]\nsweep.x.count = 3\n").is_err());
    }

    #[test]
    fn time_axis_is_split_off() {
        let g = grid("sweep.tau.values = [0, 1]\nsweep.eta.values = [0.1, 1]\n").unwrap();
        let (rest, t) = g.split_time().unwrap();
        assert_eq!(rest.names(), vec!["eta"]);
        assert_eq!(t.unwrap().values, vec![0.0, 1.0]);
    }

    #[test]
    fn unavailable_axis_is_rejected() {
        let cfg = Config::parse("sweep.tau.values = [0, 1]\n", "t").unwrap();
        assert!(Grid::from_config(&cfg, &["x", "y"]).is_err());
    }
}
