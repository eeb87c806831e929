//! The four evolution strategies behind a single ask/tell interface.
//!
//! `ask` yields the current search pdf for the mixing layer to sample and
//! accept against; `tell` consumes the evaluated generation (as centered-rank
//! utilities) and updates the distribution parameters. All strategies
//! maximize.

mod adam;
mod cem;
mod cma_es;
mod open_es;
mod snes;

pub use adam::AdamState;
pub use cem::Cem;
pub use cma_es::CmaEs;
pub use open_es::OpenEs;
pub use snes::Snes;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::gaussian::GaussianPdf;

pub const DEFAULT_WEIGHT_DECAY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    OpenEs,
    Snes,
    Cem,
    CmaEs,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Algorithm::OpenEs => "open-es",
            Algorithm::Snes => "snes",
            Algorithm::Cem => "cem",
            Algorithm::CmaEs => "cma-es",
        };
        f.write_str(s)
    }
}

/// Hyperparameters shared by all strategies; algorithm-specific fields are
/// ignored by the others.
#[derive(Debug, Clone)]
pub struct StrategyConfig {
    pub algorithm: Algorithm,
    pub initial_mean: Vec<f64>,
    pub population: usize,
    pub sigma_init: f64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    /// Defaults to population / 2 when `None`.
    pub elite_count: Option<usize>,
    pub cem_extra_variance: f64,
    pub cem_extra_decay: f64,
    pub cem_extra_floor: f64,
}

impl StrategyConfig {
    pub fn new(algorithm: Algorithm, initial_mean: Vec<f64>, population: usize) -> Self {
        StrategyConfig {
            algorithm,
            initial_mean,
            population,
            sigma_init: 0.25,
            learning_rate: 0.01,
            adam_beta1: 0.99,
            adam_beta2: 0.999,
            elite_count: None,
            cem_extra_variance: 0.01,
            cem_extra_decay: 0.995,
            cem_extra_floor: 1e-6,
        }
    }

    pub fn elite_count(&self) -> usize {
        self.elite_count.unwrap_or(self.population / 2).max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(CoreError::InvalidParameter("population must be at least 2".into()));
        }
        if !(self.sigma_init > 0.0) {
            return Err(CoreError::InvalidParameter("sigma_init must be positive".into()));
        }
        if self.initial_mean.is_empty() {
            return Err(CoreError::InvalidParameter("initial mean must be non-empty".into()));
        }
        if self.elite_count() > self.population {
            return Err(CoreError::InvalidParameter(
                "elite count cannot exceed the population size".into(),
            ));
        }
        Ok(())
    }
}

/// One of the four strategies with its mutable state.
#[derive(Debug, Clone)]
pub enum Strategy {
    OpenEs(OpenEs),
    Snes(Snes),
    Cem(Cem),
    CmaEs(CmaEs),
}

impl Strategy {
    pub fn new(config: &StrategyConfig) -> Result<Self> {
        config.validate()?;
        Ok(match config.algorithm {
            Algorithm::OpenEs => Strategy::OpenEs(OpenEs::new(config)?),
            Algorithm::Snes => Strategy::Snes(Snes::new(config)?),
            Algorithm::Cem => Strategy::Cem(Cem::new(config)?),
            Algorithm::CmaEs => Strategy::CmaEs(CmaEs::new(config)?),
        })
    }

    /// Current search pdf; an immutable snapshot, two consecutive calls are equal.
    pub fn ask(&self) -> GaussianPdf {
        match self {
            Strategy::OpenEs(s) => s.ask(),
            Strategy::Snes(s) => s.ask(),
            Strategy::Cem(s) => s.ask(),
            Strategy::CmaEs(s) => s.ask(),
        }
    }

    /// Consume an evaluated generation: `utilities` are the centered-rank
    /// utilities of the shaped fitness, aligned with `samples`.
    pub fn tell(&mut self, samples: &[Vec<f64>], utilities: &[f64]) -> Result<()> {
        if samples.len() != utilities.len() {
            return Err(CoreError::GenerationSizeMismatch {
                expected: samples.len(),
                actual: utilities.len(),
            });
        }
        match self {
            Strategy::OpenEs(s) => s.tell(samples, utilities),
            Strategy::Snes(s) => s.tell(samples, utilities),
            Strategy::Cem(s) => s.tell(samples, utilities),
            Strategy::CmaEs(s) => s.tell(samples, utilities),
        }
    }

    pub fn generation_index(&self) -> u64 {
        match self {
            Strategy::OpenEs(s) => s.generation_index(),
            Strategy::Snes(s) => s.generation_index(),
            Strategy::Cem(s) => s.generation_index(),
            Strategy::CmaEs(s) => s.generation_index(),
        }
    }

    pub fn mean(&self) -> &[f64] {
        match self {
            Strategy::OpenEs(s) => s.mean(),
            Strategy::Snes(s) => s.mean(),
            Strategy::Cem(s) => s.mean(),
            Strategy::CmaEs(s) => s.mean(),
        }
    }
}

/// Raw returns, weight-decay penalties, and the rank-based utilities the
/// strategies actually consume.
#[derive(Debug, Clone)]
pub struct ShapedFitness {
    pub raw: Vec<f64>,
    pub penalties: Vec<f64>,
    pub utilities: Vec<f64>,
}

/// Centered ranks: sort ascending (stable, ties by input index), assign rank
/// i in 0..N-1, utility = i/(N-1) - 1/2. Utilities sum to zero.
pub fn rank_transform(fitness: &[f64]) -> Result<Vec<f64>> {
    let n = fitness.len();
    if n < 2 {
        return Err(CoreError::InvalidParameter(
            "rank transform needs at least 2 individuals".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        fitness[a].partial_cmp(&fitness[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let mut utilities = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        utilities[idx] = rank as f64 / (n - 1) as f64 - 0.5;
    }
    Ok(utilities)
}

/// -0.05 |theta|^2, added to the raw return before ranking.
pub fn weight_decay_penalty(theta: &[f64]) -> f64 {
    weight_decay_penalty_with(theta, DEFAULT_WEIGHT_DECAY)
}

pub fn weight_decay_penalty_with(theta: &[f64], coefficient: f64) -> f64 {
    -coefficient * theta.iter().map(|t| t * t).sum::<f64>()
}

/// Full shaping pipeline: penalty, then centered ranks of (raw + penalty).
pub fn shape_fitness(
    raw: &[f64],
    samples: &[Vec<f64>],
    weight_decay: f64,
) -> Result<ShapedFitness> {
    if raw.len() != samples.len() {
        return Err(CoreError::GenerationSizeMismatch {
            expected: samples.len(),
            actual: raw.len(),
        });
    }
    let penalties: Vec<f64> =
        samples.iter().map(|s| weight_decay_penalty_with(s, weight_decay)).collect();
    let shaped: Vec<f64> = raw.iter().zip(&penalties).map(|(r, p)| r + p).collect();
    let utilities = rank_transform(&shaped)?;
    Ok(ShapedFitness { raw: raw.to_vec(), penalties, utilities })
}
