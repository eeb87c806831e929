//! Separable NES: diagonal Gaussian whose mean and per-coordinate sigmas
//! both follow natural-gradient ascent. With s_i = (z_i - mu) / sigma:
//!   grad_mu      = sigma .* sum_i u_i s_i / N
//!   grad_logsig  = sum_i u_i (s_i^2 - 1) / N
//! The mean uses one Adam state, log sigma a second one at the same
//! learning rate; sigma is updated multiplicatively so it stays positive.

use crate::error::Result;
use crate::gaussian::GaussianPdf;

use super::{AdamState, StrategyConfig};

#[derive(Debug, Clone)]
pub struct Snes {
    mean: Vec<f64>,
    sigma: Vec<f64>,
    adam_mean: AdamState,
    adam_log_sigma: AdamState,
    generation: u64,
    pdf: GaussianPdf,
}

impl Snes {
    pub fn new(config: &StrategyConfig) -> Result<Self> {
        let d = config.initial_mean.len();
        let sigma = vec![config.sigma_init; d];
        let pdf = GaussianPdf::diagonal(
            config.initial_mean.clone(),
            sigma.iter().map(|s| s * s).collect(),
        )?;
        Ok(Snes {
            mean: config.initial_mean.clone(),
            sigma,
            adam_mean: AdamState::new(d, config.learning_rate, config.adam_beta1, config.adam_beta2),
            adam_log_sigma: AdamState::new(
                d,
                config.learning_rate,
                config.adam_beta1,
                config.adam_beta2,
            ),
            generation: 0,
            pdf,
        })
    }

    pub fn ask(&self) -> GaussianPdf {
        self.pdf.clone()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn generation_index(&self) -> u64 {
        self.generation
    }

    pub fn tell(&mut self, samples: &[Vec<f64>], utilities: &[f64]) -> Result<()> {
        let d = self.mean.len();
        let n = samples.len() as f64;
        let mut grad_mean = vec![0.0; d];
        let mut grad_log_sigma = vec![0.0; d];
        for (z, u) in samples.iter().zip(utilities) {
            for j in 0..d {
                let s = (z[j] - self.mean[j]) / self.sigma[j];
                grad_mean[j] += u * s;
                grad_log_sigma[j] += u * (s * s - 1.0);
            }
        }
        for j in 0..d {
            grad_mean[j] *= self.sigma[j] / n;
            grad_log_sigma[j] /= n;
        }
        let delta_mean = self.adam_mean.step(&grad_mean)?;
        let delta_log_sigma = self.adam_log_sigma.step(&grad_log_sigma)?;
        for j in 0..d {
            self.mean[j] += delta_mean[j];
            self.sigma[j] *= delta_log_sigma[j].exp();
        }
        self.generation += 1;
        self.pdf = GaussianPdf::diagonal(
            self.mean.clone(),
            self.sigma.iter().map(|s| s * s).collect(),
        )?;
        Ok(())
    }
}
