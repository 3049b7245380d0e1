//! Experiment configuration: a TOML document with nested sections mirroring
//! the engine's type hierarchy.  Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use criga_core::control::{ControlStrategy, ControllerKind, ConvergenceEps, RunConfig, SizePolicy};
use criga_core::ga::{CrossoverKind, GaParams, Selection};
use criga_core::landscape::{FitnessLandscape, DEFAULT_RATIO_SAFETY};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeKindName {
    SharpPeak,
    RoyalRoad,
    DeceptiveTrap,
    Custom,
}

/// The `[landscape]` section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeConfig {
    pub kind: LandscapeKindName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Peak height, sharp_peak only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Block size, royal_road and deceptive_trap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    /// Landscape file, custom only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl LandscapeConfig {
    fn require<T: Copy>(value: Option<T>, field: &str, kind: &str) -> Result<T> {
        value.ok_or_else(|| {
            HarnessError::Config(format!("landscape.{field} is required for kind {kind}"))
        })
    }

    fn forbid<T>(value: &Option<T>, field: &str, kind: &str) -> Result<()> {
        if value.is_some() {
            return Err(HarnessError::Config(format!(
                "landscape.{field} does not apply to kind {kind}"
            )));
        }
        Ok(())
    }

    /// Builds the landscape; `base_dir` anchors a relative custom-table path.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<FitnessLandscape> {
        match self.kind {
            LandscapeKindName::SharpPeak => {
                Self::forbid(&self.block, "block", "sharp_peak")?;
                Self::forbid(&self.path, "path", "sharp_peak")?;
                let n = Self::require(self.n, "n", "sharp_peak")?;
                let sigma = Self::require(self.sigma, "sigma", "sharp_peak")?;
                Ok(FitnessLandscape::sharp_peak(n, sigma)?)
            }
            LandscapeKindName::RoyalRoad => {
                Self::forbid(&self.sigma, "sigma", "royal_road")?;
                Self::forbid(&self.path, "path", "royal_road")?;
                let n = Self::require(self.n, "n", "royal_road")?;
                let block = Self::require(self.block, "block", "royal_road")?;
                Ok(FitnessLandscape::royal_road(n, block)?)
            }
            LandscapeKindName::DeceptiveTrap => {
                Self::forbid(&self.sigma, "sigma", "deceptive_trap")?;
                Self::forbid(&self.path, "path", "deceptive_trap")?;
                let n = Self::require(self.n, "n", "deceptive_trap")?;
                let block = Self::require(self.block, "block", "deceptive_trap")?;
                Ok(FitnessLandscape::deceptive_trap(n, block)?)
            }
            LandscapeKindName::Custom => {
                Self::forbid(&self.n, "n", "custom (n comes from the file)")?;
                Self::forbid(&self.sigma, "sigma", "custom")?;
                Self::forbid(&self.block, "block", "custom")?;
                let path = self.path.clone().ok_or_else(|| {
                    HarnessError::Config("landscape.path is required for kind custom".into())
                })?;
                let resolved = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(&path),
                    _ => path,
                };
                let text = std::fs::read_to_string(&resolved).map_err(|e| {
                    HarnessError::Config(format!(
                        "landscape.path: cannot read {}: {e}",
                        resolved.display()
                    ))
                })?;
                Ok(FitnessLandscape::parse_custom(&text)?)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    Fixed,
    Basic,
    Elitist,
    ElitistSize,
}

/// The `[control]` section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub strategy: StrategyName,
    /// Constant per-bit mutation probability, fixed strategy only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation_prob: Option<f64>,
}

impl ControlConfig {
    pub fn strategy(&self) -> Result<ControlStrategy> {
        match self.strategy {
            StrategyName::Fixed => {
                let p = self.mutation_prob.ok_or_else(|| {
                    HarnessError::Config(
                        "control.mutation_prob is required for strategy fixed".into(),
                    )
                })?;
                Ok(ControlStrategy::Fixed { mutation_prob: p })
            }
            other => {
                if self.mutation_prob.is_some() {
                    return Err(HarnessError::Config(
                        "control.mutation_prob only applies to strategy fixed".into(),
                    ));
                }
                Ok(ControlStrategy::Adaptive(match other {
                    StrategyName::Basic => ControllerKind::Basic,
                    StrategyName::Elitist => ControllerKind::Elitist,
                    StrategyName::ElitistSize => ControllerKind::ElitistWithSize,
                    StrategyName::Fixed => unreachable!(),
                }))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionName {
    FitnessProportional,
    Tournament,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverName {
    OnePoint,
    Uniform,
}

/// The `[ga]` section; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    pub crossover_rate: f64,
    pub crossover: CrossoverName,
    pub selection: SelectionName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tournament_k: Option<usize>,
    pub fitness_eps: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        let params = GaParams::default();
        GaConfig {
            crossover_rate: params.crossover_rate,
            crossover: CrossoverName::OnePoint,
            selection: SelectionName::FitnessProportional,
            tournament_k: None,
            fitness_eps: params.fitness_eps,
        }
    }
}

impl GaConfig {
    pub fn params(&self) -> Result<GaParams> {
        let selection = match self.selection {
            SelectionName::FitnessProportional => {
                if self.tournament_k.is_some() {
                    return Err(HarnessError::Config(
                        "ga.tournament_k only applies to tournament selection".into(),
                    ));
                }
                Selection::FitnessProportional
            }
            SelectionName::Tournament => Selection::Tournament {
                k: self.tournament_k.ok_or_else(|| {
                    HarnessError::Config(
                        "ga.tournament_k is required for tournament selection".into(),
                    )
                })?,
            },
        };
        Ok(GaParams {
            mutation_prob: 0.0, // set per generation by the strategy
            crossover_rate: self.crossover_rate,
            selection,
            crossover: match self.crossover {
                CrossoverName::OnePoint => CrossoverKind::OnePoint,
                CrossoverName::Uniform => CrossoverKind::Uniform,
            },
            fitness_eps: self.fitness_eps,
        })
    }
}

/// The `[size_policy]` section; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SizePolicyConfig {
    pub growth_factor: f64,
    pub max_size: usize,
    /// Convergence threshold as a fraction of the initial bracket width.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_fraction: Option<f64>,
    /// Absolute convergence threshold; mutually exclusive with `eps_fraction`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_absolute: Option<f64>,
}

impl Default for SizePolicyConfig {
    fn default() -> Self {
        let policy = SizePolicy::default();
        SizePolicyConfig {
            growth_factor: policy.growth_factor,
            max_size: policy.max_size,
            eps_fraction: None,
            eps_absolute: None,
        }
    }
}

impl SizePolicyConfig {
    pub fn policy(&self) -> Result<SizePolicy> {
        let eps = match (self.eps_fraction, self.eps_absolute) {
            (Some(_), Some(_)) => {
                return Err(HarnessError::Config(
                    "size_policy.eps_fraction and size_policy.eps_absolute are mutually exclusive"
                        .into(),
                ))
            }
            (Some(f), None) => ConvergenceEps::FractionOfBetaInit(f),
            (None, Some(a)) => ConvergenceEps::Absolute(a),
            (None, None) => SizePolicy::default().eps,
        };
        Ok(SizePolicy {
            growth_factor: self.growth_factor,
            max_size: self.max_size,
            eps,
        })
    }
}

fn default_replicas() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_ratio_safety() -> f64 {
    DEFAULT_RATIO_SAFETY
}

/// The `[run]` section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Initial population size (the size controller starts at two instead).
    pub population: usize,
    /// Maximum generations per replica.
    pub budget: usize,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    /// Master seed; replica r runs on stream r of this seed.
    pub seed: u64,
    #[serde(default)]
    pub seed_master: bool,
    #[serde(default = "default_true")]
    pub stop_on_optimum: bool,
    #[serde(default = "default_ratio_safety")]
    pub ratio_safety: f64,
}

/// A full experiment: landscape, control strategy, operators, size policy
/// and run plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub landscape: LandscapeConfig,
    pub control: ControlConfig,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub size_policy: SizePolicyConfig,
    pub run: RunSection,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    fn check(&self) -> Result<()> {
        if self.run.replicas < 1 {
            return Err(HarnessError::Config("run.replicas must be ≥ 1".into()));
        }
        if self.run.budget < 1 {
            return Err(HarnessError::Config("run.budget must be ≥ 1".into()));
        }
        if self.run.population < 2 {
            return Err(HarnessError::Config("run.population must be ≥ 2".into()));
        }
        // surface strategy/operator field errors at load time
        self.control.strategy()?;
        self.ga.params()?;
        self.size_policy.policy()?;
        Ok(())
    }

    /// Builds the per-run configuration handed to the engine.
    pub fn run_config(&self) -> Result<RunConfig> {
        Ok(RunConfig {
            strategy: self.control.strategy()?,
            params: self.ga.params()?,
            policy: self.size_policy.policy()?,
            population_size: self.run.population,
            budget: self.run.budget,
            ratio_safety: self.run.ratio_safety,
            seed_master: self.run.seed_master,
            stop_on_optimum: self.run.stop_on_optimum,
        })
    }

    pub fn landscape(&self, base_dir: Option<&Path>) -> Result<FitnessLandscape> {
        self.landscape.build(base_dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[landscape]
kind = "sharp_peak"
n = 12
sigma = 8.0

[control]
strategy = "elitist"

[run]
population = 64
budget = 500
seed = 42
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let config = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(config.run.replicas, 1);
        assert!(config.run.stop_on_optimum);
        assert!(!config.run.seed_master);
        assert_eq!(config.run.ratio_safety, 2.0);
        assert_eq!(config.ga.crossover_rate, 0.7);
        let rc = config.run_config().unwrap();
        assert_eq!(
            rc.strategy,
            ControlStrategy::Adaptive(ControllerKind::Elitist)
        );
        let landscape = config.landscape(None).unwrap();
        assert_eq!(landscape.n(), 12);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let with_typo = MINIMAL.replace("budget = 500", "budget = 500\nbuget2 = 7");
        let err = ExperimentConfig::from_toml_str(&with_typo).unwrap_err();
        assert_eq!(err.exit_code(), 1);

        let top_level = format!("{MINIMAL}\n[extra]\nx = 1\n");
        assert!(ExperimentConfig::from_toml_str(&top_level).is_err());
    }

    #[test]
    fn field_errors_name_the_field() {
        let no_sigma = MINIMAL.replace("sigma = 8.0", "");
        let err = ExperimentConfig::from_toml_str(&no_sigma).unwrap_err().to_string();
        assert!(err.contains("landscape.sigma"), "{err}");

        let fixed_without_p = MINIMAL.replace("strategy = \"elitist\"", "strategy = \"fixed\"");
        let err = ExperimentConfig::from_toml_str(&fixed_without_p)
            .unwrap_err()
            .to_string();
        assert!(err.contains("control.mutation_prob"), "{err}");

        let stray_block = MINIMAL.replace("sigma = 8.0", "sigma = 8.0\nblock = 4");
        let err = ExperimentConfig::from_toml_str(&stray_block)
            .unwrap_err()
            .to_string();
        assert!(err.contains("landscape.block"), "{err}");
    }

    #[test]
    fn run_section_bounds_are_validated() {
        for (field, bad) in [
            ("budget = 500", "budget = 0"),
            ("population = 64", "population = 1"),
            ("seed = 42", "seed = 42\nreplicas = 0"),
        ] {
            let text = MINIMAL.replace(field, bad);
            assert!(ExperimentConfig::from_toml_str(&text).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        // output headers embed the config as JSON; a re-parsed header must
        // rebuild the identical experiment
        let config = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn tournament_selection_needs_k() {
        let text = MINIMAL.replace(
            "[run]",
            "[ga]\nselection = \"tournament\"\n\n[run]",
        );
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("tournament_k"), "{err}");
    }
}
