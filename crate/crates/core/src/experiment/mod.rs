//! Experiment driver: wires a strategy, the mixing layer, and an
//! environment; accounts every episode evaluation; aggregates multi-seed
//! runs into summary curves and reuse statistics.

mod config;

pub use config::{ConfigError, ExperimentConfig, MixingMode, SeedsSpec, SCHEMA_VERSION};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envs::{rollout, EnvSpec};
use crate::error::{CoreError, Result};
use crate::mixing::{mix, mix_extended, Archive, Generation, MixOutcome};
use crate::strategies::{shape_fitness, Strategy, StrategyConfig};

/// Fixed CSV header for per-seed run files.
pub const CSV_HEADER: &str =
    "generation,cum_evals,mean_fitness,max_fitness,min_fitness,reused_total,reused_im,reused_eim,fresh";

/// One row of experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub cum_evals: u64,
    pub mean_fitness: f64,
    pub max_fitness: f64,
    pub min_fitness: f64,
    pub reused_total: usize,
    pub reused_im: usize,
    pub reused_eim: usize,
    pub fresh: usize,
}

/// Multi-seed aggregate: pointwise mean curve with the 68% confidence
/// interval of the mean, and whole-run reuse totals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub seeds: usize,
    pub generations: usize,
    pub mean_fitness: Vec<f64>,
    /// sample std across seeds / sqrt(seeds), per generation
    pub ci_half_width: Vec<f64>,
    pub mean_cum_evals: Vec<f64>,
    pub total_samples: u64,
    pub total_evals: u64,
    pub total_reuse_pct: f64,
    /// share of reused samples that came from standard importance mixing
    pub im_share_pct: f64,
    /// share of reused samples that came from the archive extension
    pub eim_share_pct: f64,
}

/// Derive an episode rng from (master seed, generation, sample index) so
/// evaluation order and thread count cannot change results.
pub fn episode_rng(seed: u64, generation: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&generation.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..32].copy_from_slice(&0x9e37_79b9_7f4a_7c15u64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn env_spec_for(config: &ExperimentConfig) -> EnvSpec {
    let mut spec = EnvSpec::new(config.env);
    if config.gym_compat_angle {
        spec.set_gym_compat_angle();
    }
    if let Some(steps) = config.acrobot_max_steps {
        spec.max_steps = steps;
    }
    spec
}

/// Execute one seeded run and return the per-generation records.
pub fn run_one(config: &ExperimentConfig, seed: u64) -> Result<Vec<GenerationRecord>> {
    config.validate().map_err(|e| CoreError::InvalidParameter(e.to_string()))?;
    let env = env_spec_for(config);
    let dim = env.param_count();
    let population = config.population;

    let mut strategy_cfg =
        StrategyConfig::new(config.algorithm, vec![0.0; dim], population);
    strategy_cfg.sigma_init = config.sigma_init;
    strategy_cfg.learning_rate = config.learning_rate;
    strategy_cfg.adam_beta1 = config.adam_beta1;
    strategy_cfg.adam_beta2 = config.adam_beta2;
    strategy_cfg.elite_count = Some(config.elite_count());
    strategy_cfg.cem_extra_variance = config.cem_extra_variance;
    strategy_cfg.cem_extra_decay = config.cem_extra_decay;
    strategy_cfg.cem_extra_floor = config.cem_extra_floor;
    let mut strategy = Strategy::new(&strategy_cfg)?;

    let archive_capacity = match config.mixing {
        MixingMode::Eim => config.archive_k,
        _ => 1,
    };
    let mut archive = Archive::new(archive_capacity);
    let mut master_rng = ChaCha8Rng::seed_from_u64(seed);

    let budget = config.generation_budget();
    let mut records = Vec::with_capacity(budget);
    let mut cum_evals: u64 = 0;

    for generation_index in 0..budget {
        let pdf = strategy.ask();
        let outcome: MixOutcome = match (config.mixing, archive.is_empty()) {
            (MixingMode::None, _) | (_, true) => {
                let generation = Generation::sample_direct(&pdf, &mut master_rng, population);
                MixOutcome {
                    generation,
                    reused_im: 0,
                    reused_eim: 0,
                    fresh_count: population,
                }
            }
            (MixingMode::Im, false) => {
                let (p_old, g_old) = archive.most_recent().expect("archive checked non-empty");
                mix(&pdf, p_old, g_old, &mut master_rng, population)?
            }
            (MixingMode::Eim, false) => mix_extended(&pdf, &archive, &mut master_rng, population)?,
        };
        let mut generation = outcome.generation;

        let to_evaluate = generation.unevaluated_indices();
        let evaluated: Vec<(usize, f64)> = to_evaluate
            .par_iter()
            .map(|&i| {
                let mut rng = episode_rng(seed, generation_index as u64, i as u64);
                let result = rollout(&env, &generation.samples[i], &mut rng)?;
                Ok((i, result.episode_return))
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, fitness) in evaluated {
            generation.fitness[i] = Some(fitness);
        }
        cum_evals += to_evaluate.len() as u64;

        let raw = generation.fitness_values()?;
        let shaped = shape_fitness(&raw, &generation.samples, config.weight_decay)?;
        strategy.tell(&generation.samples, &shaped.utilities)?;
        archive.push(pdf, generation);

        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        records.push(GenerationRecord {
            generation: generation_index,
            cum_evals,
            mean_fitness: mean,
            max_fitness: max,
            min_fitness: min,
            reused_total: outcome.reused_im + outcome.reused_eim,
            reused_im: outcome.reused_im,
            reused_eim: outcome.reused_eim,
            fresh: outcome.fresh_count,
        });
    }
    Ok(records)
}

/// Pointwise mean and 68% CI across seed runs, plus whole-run reuse totals.
pub fn aggregate(runs: &[Vec<GenerationRecord>]) -> Result<RunSummary> {
    if runs.len() < 2 {
        return Err(CoreError::InvalidParameter("aggregate needs at least 2 runs".into()));
    }
    let generations = runs[0].len();
    if let Some(bad) = runs.iter().find(|r| r.len() != generations) {
        return Err(CoreError::GenerationSizeMismatch {
            expected: generations,
            actual: bad.len(),
        });
    }
    let s = runs.len() as f64;
    let mut mean_fitness = Vec::with_capacity(generations);
    let mut ci_half_width = Vec::with_capacity(generations);
    let mut mean_cum_evals = Vec::with_capacity(generations);
    for g in 0..generations {
        let values: Vec<f64> = runs.iter().map(|r| r[g].mean_fitness).collect();
        let mean = values.iter().sum::<f64>() / s;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (s - 1.0);
        mean_fitness.push(mean);
        ci_half_width.push(var.sqrt() / s.sqrt());
        mean_cum_evals.push(runs.iter().map(|r| r[g].cum_evals as f64).sum::<f64>() / s);
    }
    let mut total_samples: u64 = 0;
    let mut total_reused: u64 = 0;
    let mut total_im: u64 = 0;
    let mut total_eim: u64 = 0;
    let mut total_evals: u64 = 0;
    for run in runs {
        for rec in run {
            total_samples += (rec.reused_total + rec.fresh) as u64;
            total_reused += rec.reused_total as u64;
            total_im += rec.reused_im as u64;
            total_eim += rec.reused_eim as u64;
            total_evals += rec.fresh as u64;
        }
    }
    let pct = |num: u64, den: u64| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
    Ok(RunSummary {
        seeds: runs.len(),
        generations,
        mean_fitness,
        ci_half_width,
        mean_cum_evals,
        total_samples,
        total_evals,
        total_reuse_pct: pct(total_reused, total_samples),
        im_share_pct: pct(total_im, total_reused),
        eim_share_pct: pct(total_eim, total_reused),
    })
}

/// Render records as CSV text with the fixed header; byte-stable for a
/// given record list.
pub fn records_to_csv(records: &[GenerationRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.generation,
            r.cum_evals,
            r.mean_fitness,
            r.max_fitness,
            r.min_fitness,
            r.reused_total,
            r.reused_im,
            r.reused_eim,
            r.fresh
        ));
    }
    out
}

/// Parse CSV text produced by [`records_to_csv`].
pub fn records_from_csv(text: &str) -> Result<Vec<GenerationRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(CoreError::EmptySample)?;
    if header.trim() != CSV_HEADER {
        return Err(CoreError::InvalidParameter(format!("unexpected CSV header: {header}")));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(CoreError::InvalidParameter(format!(
                "line {}: expected 9 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_err = |e: &dyn std::fmt::Display| {
            CoreError::InvalidParameter(format!("line {}: {}", lineno + 2, e))
        };
        records.push(GenerationRecord {
            generation: fields[0].parse().map_err(|e: std::num::ParseIntError| parse_err(&e))?,
            cum_evals: fields[1].parse().map_err(|e: std::num::ParseIntError| parse_err(&e))?,
            mean_fitness: fields[2].parse().map_err(|e: std::num::ParseFloatError| parse_err(&e))?,
            max_fitness: fields[3].parse().map_err(|e: std::num::ParseFloatError| parse_err(&e))?,
            min_fitness: fields[4].parse().map_err(|e: std::num::ParseFloatError| parse_err(&e))?,
            reused_total: fields[5].parse().map_err(|e: std::num::ParseIntError| parse_err(&e))?,
            reused_im: fields[6].parse().map_err(|e: std::num::ParseIntError| parse_err(&e))?,
            reused_eim: fields[7].parse().map_err(|e: std::num::ParseIntError| parse_err(&e))?,
            fresh: fields[8].parse().map_err(|e: std::num::ParseIntError| parse_err(&e))?,
        });
    }
    Ok(records)
}
