use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use scd_core::distill::AXIS_NAMES;
use scd_core::hamiltonian::{Family, ModelSpec, TargetName};
use scd_core::range::{default_target, RangeOptions};
use scd_core::states::StateSampler;

use crate::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    HaarPure,
    Induced,
    GhzClass,
    WClass,
    BellDiagonal,
}

/// Model parameter swept by the `spectrum` command.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    #[default]
    G,
    Gamma,
    Delta,
    Theta,
}

impl Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Sweep::G => "g",
            Sweep::Gamma => "gamma",
            Sweep::Delta => "delta",
            Sweep::Theta => "theta",
        }
    }

    pub fn apply(self, spec: &ModelSpec, x: f64) -> ModelSpec {
        let mut s = spec.clone();
        match self {
            Sweep::G => s.g = x,
            Sweep::Gamma => s.gamma = x,
            Sweep::Delta => s.delta = x,
            Sweep::Theta => s.theta = x,
        }
        s
    }
}

/// Everything a run depends on. Read from a flat JSON object whose model
/// keys are those of [`ModelSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Stem of the output files; defaults to the command name.
    pub experiment: Option<String>,
    #[serde(flatten)]
    pub model: ModelSpec,
    pub sampler: Option<SamplerKind>,
    pub rank: usize,
    pub target: Option<String>,
    pub n_samples: Option<usize>,
    pub bins: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,

    pub sweep: Sweep,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_points: usize,

    pub g_min: f64,
    pub g_max: f64,
    pub g_points: usize,
    pub beta_max: f64,
    pub beta_points: usize,
    pub theta_points: usize,

    pub g_values: Vec<f64>,
    pub base: [f64; 5],
    pub planes: Vec<[String; 2]>,
    pub resolution: usize,
    pub witness_samples: usize,

    pub ranks: Vec<usize>,
    pub independence_bins: usize,

    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let range = RangeOptions::default();
        Self {
            experiment: None,
            model: ModelSpec::default(),
            sampler: None,
            rank: 4,
            target: None,
            n_samples: None,
            bins: 200,
            seed: 0,
            workers: None,
            out: None,
            sweep: Sweep::G,
            sweep_min: 0.0,
            sweep_max: 3.0,
            sweep_points: 13,
            g_min: 0.0,
            g_max: 3.0,
            g_points: 13,
            beta_max: 5.0,
            beta_points: 51,
            theta_points: 12,
            g_values: vec![1.0, 2.0],
            base: [0.0, 0.2, 0.3, 0.0, 0.0],
            planes: vec![["cxx".into(), "m2".into()], ["m1".into(), "m2".into()]],
            resolution: 101,
            witness_samples: 100_000,
            ranks: vec![1, 2, 3, 4],
            independence_bins: 20,
            restarts: range.restarts,
            tol: range.tol,
            max_iter: range.max_iter,
        }
    }
}

fn known_keys() -> BTreeSet<String> {
    match serde_json::to_value(RunConfig::default()) {
        Ok(Value::Object(m)) => m.into_iter().map(|(k, _)| k).collect(),
        _ => unreachable!("RunConfig serializes to an object"),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let map: Map<String, Value> =
            serde_json::from_str(text).map_err(|e| ConfigError(format!("config is not a flat JSON object: {e}")))?;
        let known = known_keys();
        let unknown: Vec<&str> = map.keys().filter(|k| !known.contains(*k)).map(String::as_str).collect();
        if !unknown.is_empty() {
            return Err(ConfigError(format!("unknown config keys: {}", unknown.join(", "))));
        }
        if let Some((k, _)) = map.iter().find(|(_, v)| v.is_object()) {
            return Err(ConfigError(format!("config must be flat, `{k}` is an object")));
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| ConfigError(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn target(&self) -> Result<TargetName, ConfigError> {
        match &self.target {
            None => Ok(default_target(&self.model)),
            Some(s) => s.parse().map_err(|e| ConfigError(format!("{e}"))),
        }
    }

    /// The sampler named in the config, or the natural one for the target.
    pub fn sampler(&self) -> Result<StateSampler, ConfigError> {
        let kind = match self.sampler {
            Some(k) => k,
            None => match self.target()? {
                TargetName::Ghz3 => SamplerKind::GhzClass,
                TargetName::W3 => SamplerKind::WClass,
                _ => SamplerKind::HaarPure,
            },
        };
        let dims = self.model.site_dims();
        let sampler = match kind {
            SamplerKind::HaarPure => StateSampler::HaarPure { dims },
            SamplerKind::Induced => StateSampler::Induced { dims, rank: self.rank },
            SamplerKind::GhzClass => StateSampler::GhzClass,
            SamplerKind::WClass => StateSampler::WClass,
            SamplerKind::BellDiagonal => StateSampler::BellDiagonal,
        };
        sampler.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(sampler)
    }

    pub fn samples(&self, default: usize) -> Result<usize, ConfigError> {
        match self.n_samples.unwrap_or(default) {
            0 => Err(ConfigError("n_samples must be positive".into())),
            n => Ok(n),
        }
    }

    pub fn range_options(&self) -> RangeOptions {
        RangeOptions {
            restarts: self.restarts,
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            ..RangeOptions::default()
        }
    }

    pub fn sweep_grid(&self) -> Result<Vec<f64>, ConfigError> {
        linspace(self.sweep_min, self.sweep_max, self.sweep_points, "sweep")
    }

    pub fn g_grid(&self) -> Result<Vec<f64>, ConfigError> {
        linspace(self.g_min, self.g_max, self.g_points, "g")
    }

    pub fn beta_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if self.beta_max.is_nan() || self.beta_max <= 0.0 {
            return Err(ConfigError("beta_max must be positive".into()));
        }
        linspace(0.0, self.beta_max, self.beta_points, "beta")
    }

    /// `theta_points` angles evenly spaced over `[0, 2π)`.
    pub fn theta_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if self.theta_points == 0 {
            return Err(ConfigError("theta_points must be positive".into()));
        }
        let step = TAU / self.theta_points as f64;
        Ok((0..self.theta_points).map(|k| k as f64 * step).collect())
    }

    pub fn plane_axes(&self) -> Result<Vec<(usize, usize)>, ConfigError> {
        let index = |name: &str| {
            AXIS_NAMES
                .iter()
                .position(|a| *a == name)
                .ok_or_else(|| ConfigError(format!("unknown axis `{name}`, expected one of {AXIS_NAMES:?}")))
        };
        if self.planes.is_empty() {
            return Err(ConfigError("planes must name at least one pair of axes".into()));
        }
        self.planes.iter().map(|[a, b]| Ok((index(a)?, index(b)?))).collect()
    }

    pub fn require_family(&self, allowed: &[Family], command: &str) -> Result<(), ConfigError> {
        if allowed.contains(&self.model.family) {
            Ok(())
        } else {
            let names: Vec<&str> = allowed.iter().map(|f| f.name()).collect();
            Err(ConfigError(format!(
                "{command} needs family {}, got {}",
                names.join(" or "),
                self.model.family
            )))
        }
    }
}

fn linspace(lo: f64, hi: f64, points: usize, name: &str) -> Result<Vec<f64>, ConfigError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(ConfigError(format!("{name} grid bounds must be finite")));
    }
    match points {
        0 => Err(ConfigError(format!("{name}_points must be positive"))),
        1 => Ok(vec![lo]),
        n => {
            if hi < lo {
                return Err(ConfigError(format!("{name}_max must not be below {name}_min")));
            }
            let step = (hi - lo) / (n - 1) as f64;
            Ok((0..n)
                .map(|k| if k == n - 1 { hi } else { lo + k as f64 * step })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn model_keys_are_flat() {
        let c = RunConfig::from_json(r#"{"family": "xxz", "delta": 0.5, "g": 1.5, "n_samples": 10}"#).unwrap();
        assert_eq!(c.model, ModelSpec::xxz(0.5, 1.5));
        assert_eq!(c.n_samples, Some(10));
    }

    #[test]
    fn rejects_unknown_and_nested_keys() {
        assert!(RunConfig::from_json(r#"{"gama": 1.0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"experiment": {"a": 1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"family": "ising"}"#).is_err());
        assert!(RunConfig::from_json("[1, 2]").is_err());
    }

    #[test]
    fn grids() {
        let c = RunConfig::default();
        let g = c.g_grid().unwrap();
        assert_eq!(g.len(), 13);
        assert_eq!(g[12], 3.0);
        let t = c.theta_grid().unwrap();
        assert!(t.last().unwrap() < &TAU);
        assert!(linspace(1.0, 0.0, 3, "g").is_err());
    }

    #[test]
    fn default_sampler_follows_target() {
        let c = RunConfig {
            model: ModelSpec::ring_xy(3, 1.0, 0.5),
            target: Some("w3".into()),
            ..RunConfig::default()
        };
        assert_eq!(c.sampler().unwrap(), StateSampler::WClass);
        assert_eq!(c.plane_axes().unwrap(), vec![(0, 4), (3, 4)]);
    }
}
