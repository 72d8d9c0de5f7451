//! Experiment configuration: strict JSON with documented defaults.

use serde::{Deserialize, Serialize};

use crate::digest::json_digest;
use crate::error::{Error, Result};
use crate::model::{self, ModelSpec};
use crate::sde::{GridMode, TimeChange, DEFAULT_STEPS, MIN_STEPS};
use crate::shape::DEFAULT_CELLS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Spectrum,
    SdePaths,
    Pointprocess,
    Gaps,
    Repulsion,
    Counting,
    Shape,
    Crosscheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Spectrum,
        ExperimentKind::SdePaths,
        ExperimentKind::Pointprocess,
        ExperimentKind::Gaps,
        ExperimentKind::Repulsion,
        ExperimentKind::Counting,
        ExperimentKind::Shape,
        ExperimentKind::Crosscheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::SdePaths => "sde_paths",
            ExperimentKind::Pointprocess => "pointprocess",
            ExperimentKind::Gaps => "gaps",
            ExperimentKind::Repulsion => "repulsion",
            ExperimentKind::Counting => "counting",
            ExperimentKind::Shape => "shape",
            ExperimentKind::Crosscheck => "crosscheck",
        }
    }

    /// Whether a continuum sampler (and hence `eta > 0`, `sigma > 0`) is involved.
    pub fn uses_sde(self) -> bool {
        self != ExperimentKind::Spectrum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeConfig {
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub grid: GridMode,
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

impl Default for SdeConfig {
    fn default() -> Self {
        SdeConfig { steps: DEFAULT_STEPS, grid: GridMode::UniformV }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    #[serde(default = "default_shards")]
    pub shards: u64,
    #[serde(default)]
    pub base_seed: u64,
}

fn default_replicas() -> u64 {
    100
}

fn default_shards() -> u64 {
    1
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { replicas: 100, shards: 1, base_seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// No files are written when absent.
    #[serde(default)]
    pub directory: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Jsonl, Format::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: None, formats: default_formats() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeEnergy {
    /// `mu` uniform over the whole spectrum, theoretical `E` arcsine.
    #[default]
    Arcsine,
    /// `mu` uniform over the window around `model.energy`.
    Fixed,
}

/// Experiment-specific parameters; which are required depends on the kind.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Spectral parameters (sde_paths, gaps, counting, crosscheck).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Repulsion interval lengths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// Sampling window of the point process; defaults to `±model.window_radius`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_mode: Option<ShapeEnergy>,
    /// Number of leading replicas whose SDE paths are dumped as CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelSpec,
    #[serde(default)]
    pub sde: SdeConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub params: Params,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, model: ModelSpec) -> Self {
        ExperimentConfig {
            experiment,
            model,
            sde: SdeConfig::default(),
            mc: McConfig::default(),
            output: OutputConfig::default(),
            params: Params::default(),
        }
    }

    /// SHA-256 of the canonical JSON form; independent of field order.
    pub fn hash(&self) -> Result<String> {
        json_digest(self)
    }

    pub fn cells(&self) -> usize {
        self.params.cells.unwrap_or(DEFAULT_CELLS)
    }

    pub fn window(&self) -> (f64, f64) {
        self.params
            .window
            .unwrap_or((-self.model.window_radius, self.model.window_radius))
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.params.lambdas.clone().unwrap_or_default()
    }

    pub fn time_change(&self) -> Result<TimeChange> {
        TimeChange::new(self.model.sigma * model::rho(self.model.energy)?, self.model.eta)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v: Vec<String> = self.model.violations().into_iter().map(|m| format!("model.{m}")).collect();
        if self.sde.steps < MIN_STEPS {
            v.push(format!("sde.steps: must be >= {MIN_STEPS}, got {}", self.sde.steps));
        }
        if self.mc.replicas < 1 {
            v.push("mc.replicas: must be >= 1".into());
        }
        if self.mc.shards < 1 {
            v.push("mc.shards: must be >= 1".into());
        } else if self.mc.replicas % self.mc.shards != 0 {
            v.push(format!(
                "mc.shards: {} does not divide mc.replicas = {}",
                self.mc.shards, self.mc.replicas
            ));
        }
        let kind = self.experiment;
        if kind.uses_sde() {
            if self.model.eta == 0.0 {
                v.push("model.eta: the continuum engine needs eta > 0".into());
            }
            if self.model.sigma == 0.0 {
                v.push("model.sigma: the continuum engine needs sigma > 0".into());
            }
        }
        let need = |v: &mut Vec<String>, name: &str, vals: &Option<Vec<f64>>, nonneg: bool| match vals {
            None => v.push(format!("params.{name}: required for experiment {}", kind.name())),
            Some(xs) if xs.is_empty() => v.push(format!("params.{name}: must not be empty")),
            Some(xs) => {
                if xs.iter().any(|x| !x.is_finite() || (nonneg && *x < 0.0)) {
                    let what = if nonneg { "finite and >= 0" } else { "finite" };
                    v.push(format!("params.{name}: entries must be {what}"));
                }
            }
        };
        match kind {
            ExperimentKind::Gaps | ExperimentKind::Counting | ExperimentKind::Crosscheck => {
                need(&mut v, "lambdas", &self.params.lambdas, true)
            }
            ExperimentKind::SdePaths => need(&mut v, "lambdas", &self.params.lambdas, false),
            ExperimentKind::Repulsion => need(&mut v, "eps", &self.params.eps, true),
            _ => {}
        }
        if let Some((a, b)) = self.params.window {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                v.push(format!("params.window: [{a}, {b}] is not an interval"));
            }
        }
        if self.params.cells == Some(0) {
            v.push("params.cells: must be positive".into());
        }
        if self.params.path_stride == Some(0) {
            v.push("params.path_stride: must be positive".into());
        }
        if self.output.formats.is_empty() {
            v.push("output.formats: must list at least one format".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"{"experiment": "spectrum", "model": {"n": 100, "sigma": 1.0, "eta": 0.3}}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.sde.steps, 4096);
        assert_eq!(c.sde.grid, GridMode::UniformV);
        assert_eq!(c.mc, McConfig { replicas: 100, shards: 1, base_seed: 0 });
        assert_eq!(c.model.tau_decay, 0.5);
        assert_eq!(c.model.window_radius, 10.0);
        assert_eq!(c.output.formats, vec![Format::Jsonl, Format::Csv]);
        assert_eq!(c.window(), (-10.0, 10.0));
    }

    #[test]
    fn range_violation_names_field() {
        let text = MINIMAL.replace("0.3", "0.7");
        match parse_config(&text) {
            Err(Error::Config(v)) => assert!(v.iter().any(|m| m.starts_with("model.eta")), "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_violations_are_listed() {
        let text = r#"{"experiment": "gaps", "model": {"n": 1, "sigma": -1.0, "eta": 0.3, "energy": 3.0},
                       "sde": {"steps": 4}, "mc": {"replicas": 10, "shards": 3}}"#;
        match parse_config(text) {
            Err(Error::Config(v)) => {
                for field in ["model.n", "model.sigma", "model.energy", "sde.steps", "mc.shards", "params.lambdas"] {
                    assert!(v.iter().any(|m| m.starts_with(field)), "missing {field} in {v:?}");
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"experiment": "spectrum", "model": {"n": 100, "sigma": 1.0, "eta": 0.3}, "extra": 1}"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
        let nested = r#"{"experiment": "spectrum", "model": {"n": 100, "sigma": 1.0, "eta": 0.3, "nn": 2}}"#;
        assert!(matches!(parse_config(nested), Err(Error::Config(_))));
    }

    #[test]
    fn sde_experiments_need_positive_eta() {
        let text = r#"{"experiment": "counting", "model": {"n": 100, "sigma": 1.0, "eta": 0.0}, "params": {"lambdas": [1.0]}}"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
    }

    #[test]
    fn hash_ignores_field_order() {
        let a = parse_config(MINIMAL).unwrap();
        let b = parse_config(r#"{"model": {"eta": 0.3, "sigma": 1.0, "n": 100}, "experiment": "spectrum"}"#).unwrap();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        let mut c = a.clone();
        c.mc.base_seed = 1;
        assert_ne!(a.hash().unwrap(), c.hash().unwrap());
    }

    fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
        (
            0usize..ExperimentKind::ALL.len(),
            2usize..5000,
            0.01f64..3.0,
            0.01f64..=0.5,
            -1.9f64..1.9,
            (1u64..50, 1u64..5, any::<u64>()),
            16usize..10_000,
            proptest::collection::vec(0.0f64..100.0, 1..5),
            proptest::option::of(1usize..1000),
        )
            .prop_map(|(k, n, sigma, eta, energy, (reps, shards, seed), steps, lambdas, cells)| {
                let mut c = ExperimentConfig::new(ExperimentKind::ALL[k], ModelSpec::critical(n, sigma, eta, energy));
                c.sde.steps = steps;
                c.mc = McConfig { replicas: reps * shards, shards, base_seed: seed };
                c.params.lambdas = Some(lambdas.clone());
                c.params.eps = Some(lambdas);
                c.params.cells = cells;
                c
            })
    }

    proptest! {
        #[test]
        fn round_trip(c in arb_config()) {
            prop_assert!(c.validate().is_ok(), "{:?}", c.violations());
            let text = serde_json::to_string_pretty(&c).unwrap();
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.hash().unwrap(), c.hash().unwrap());
        }
    }
}
