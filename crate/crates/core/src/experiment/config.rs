//! Experiment configuration: a flat TOML file with a versioned schema.
//! Unknown keys are hard errors so hyperparameter typos cannot silently
//! change a run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envs::EnvId;
use crate::strategies::Algorithm;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {message}")]
    Field { field: &'static str, message: String },

    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingMode {
    None,
    Im,
    Eim,
}

impl std::fmt::Display for MixingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MixingMode::None => "none",
            MixingMode::Im => "im",
            MixingMode::Eim => "eim",
        })
    }
}

/// Seeds either as a count (0..n) or an explicit list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedsSpec {
    Count(u64),
    List(Vec<u64>),
}

impl SeedsSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedsSpec::Count(n) => (0..*n).collect(),
            SeedsSpec::List(v) => v.clone(),
        }
    }
}

fn default_population() -> usize {
    50
}
fn default_mixing() -> MixingMode {
    MixingMode::Im
}
fn default_archive_k() -> usize {
    1
}
fn default_sigma() -> f64 {
    0.25
}
fn default_lr() -> f64 {
    0.01
}
fn default_beta1() -> f64 {
    0.99
}
fn default_beta2() -> f64 {
    0.999
}
fn default_weight_decay() -> f64 {
    0.05
}
fn default_elite_fraction() -> f64 {
    0.5
}
fn default_cem_extra() -> f64 {
    0.01
}
fn default_cem_decay() -> f64 {
    0.995
}
fn default_cem_floor() -> f64 {
    1e-6
}
fn default_seeds() -> SeedsSpec {
    SeedsSpec::Count(25)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub env: EnvId,
    pub algorithm: Algorithm,
    #[serde(default = "default_population")]
    pub population: usize,
    /// Defaults to 1000 for open-es/snes and 400 for cem/cma-es.
    #[serde(default)]
    pub generations: Option<usize>,
    #[serde(default = "default_mixing")]
    pub mixing: MixingMode,
    #[serde(default = "default_archive_k")]
    pub archive_k: usize,
    #[serde(default = "default_sigma")]
    pub sigma_init: f64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_weight_decay")]
    pub weight_decay: f64,
    #[serde(default = "default_elite_fraction")]
    pub elite_fraction: f64,
    #[serde(default = "default_cem_extra")]
    pub cem_extra_variance: f64,
    #[serde(default = "default_cem_decay")]
    pub cem_extra_decay: f64,
    #[serde(default = "default_cem_floor")]
    pub cem_extra_floor: f64,
    #[serde(default = "default_seeds")]
    pub seeds: SeedsSpec,
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Cart-pole failure angle of 12 degrees instead of the default 15.
    #[serde(default)]
    pub gym_compat_angle: bool,
    /// Override for the acrobot step cap (default 200).
    #[serde(default)]
    pub acrobot_max_steps: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(env: EnvId, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            env,
            algorithm,
            population: default_population(),
            generations: None,
            mixing: default_mixing(),
            archive_k: default_archive_k(),
            sigma_init: default_sigma(),
            learning_rate: default_lr(),
            adam_beta1: default_beta1(),
            adam_beta2: default_beta2(),
            weight_decay: default_weight_decay(),
            elite_fraction: default_elite_fraction(),
            cem_extra_variance: default_cem_extra(),
            cem_extra_decay: default_cem_decay(),
            cem_extra_floor: default_cem_floor(),
            seeds: default_seeds(),
            output_dir: None,
            gym_compat_angle: false,
            acrobot_max_steps: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Generation budget, defaulting per algorithm.
    pub fn generation_budget(&self) -> usize {
        self.generations.unwrap_or(match self.algorithm {
            Algorithm::OpenEs | Algorithm::Snes => 1000,
            Algorithm::Cem | Algorithm::CmaEs => 400,
        })
    }

    pub fn elite_count(&self) -> usize {
        ((self.population as f64 * self.elite_fraction).floor() as usize).max(1)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn field(field: &'static str, message: String) -> ConfigError {
            ConfigError::Field { field, message }
        }
        if self.schema_version != SCHEMA_VERSION {
            return Err(field(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if self.population < 2 {
            return Err(field("population", format!("must be >= 2, got {}", self.population)));
        }
        if self.archive_k < 1 {
            return Err(field("archive_k", format!("must be >= 1, got {}", self.archive_k)));
        }
        if !(self.sigma_init > 0.0) {
            return Err(field("sigma_init", format!("must be > 0, got {}", self.sigma_init)));
        }
        if !(self.learning_rate > 0.0) {
            return Err(field(
                "learning_rate",
                format!("must be > 0, got {}", self.learning_rate),
            ));
        }
        for (name, beta) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(ConfigError::Field {
                    field: if name == "adam_beta1" { "adam_beta1" } else { "adam_beta2" },
                    message: format!("must be in [0, 1), got {beta}"),
                });
            }
        }
        if self.weight_decay < 0.0 {
            return Err(field(
                "weight_decay",
                format!("must be >= 0, got {}", self.weight_decay),
            ));
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return Err(field(
                "elite_fraction",
                format!("must be in (0, 1], got {}", self.elite_fraction),
            ));
        }
        if self.seeds.seeds().is_empty() {
            return Err(field("seeds", "at least one seed is required".into()));
        }
        if self.generation_budget() == 0 {
            return Err(field("generations", "must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_protocol() {
        let cfg = ExperimentConfig::new(EnvId::CartPole, Algorithm::Snes);
        assert_eq!(cfg.population, 50);
        assert_eq!(cfg.sigma_init, 0.25);
        assert_eq!(cfg.learning_rate, 0.01);
        assert_eq!(cfg.adam_beta1, 0.99);
        assert_eq!(cfg.adam_beta2, 0.999);
        assert_eq!(cfg.weight_decay, 0.05);
        assert_eq!(cfg.generation_budget(), 1000);
        assert_eq!(ExperimentConfig::new(EnvId::CartPole, Algorithm::Cem).generation_budget(), 400);
        assert_eq!(cfg.seeds.seeds().len(), 25);
    }

    #[test]
    fn minimal_toml_parses() {
        let cfg = ExperimentConfig::from_toml_str(
            "schema_version = 1\nenv = \"cartpole\"\nalgorithm = \"snes\"\n",
        )
        .unwrap();
        assert_eq!(cfg.env, EnvId::CartPole);
        assert_eq!(cfg.algorithm, Algorithm::Snes);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let r = ExperimentConfig::from_toml_str(
            "schema_version = 1\nenv = \"cartpole\"\nalgorithm = \"snes\"\nlearning_rte = 0.1\n",
        );
        assert!(r.is_err());
    }

    #[test]
    fn bad_values_report_the_field() {
        let r = ExperimentConfig::from_toml_str(
            "schema_version = 1\nenv = \"cartpole\"\nalgorithm = \"snes\"\npopulation = 1\n",
        );
        match r {
            Err(ConfigError::Field { field, .. }) => assert_eq!(field, "population"),
            other => panic!("expected field error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let r = ExperimentConfig::from_toml_str(
            "schema_version = 2\nenv = \"cartpole\"\nalgorithm = \"snes\"\n",
        );
        assert!(r.is_err());
    }

    #[test]
    fn seed_list_form() {
        let cfg = ExperimentConfig::from_toml_str(
            "schema_version = 1\nenv = \"acrobot\"\nalgorithm = \"cem\"\nseeds = [3, 5, 8]\n",
        )
        .unwrap();
        assert_eq!(cfg.seeds.seeds(), vec![3, 5, 8]);
    }
}
