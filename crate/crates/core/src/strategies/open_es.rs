//! OpenAI-style ES: isotropic Gaussian noise with a fixed sigma, only the
//! mean is adapted, via an Adam step on the score-function gradient
//! estimate g = sum_i u_i (z_i - mu) / (N sigma^2).

use crate::error::Result;
use crate::gaussian::GaussianPdf;

use super::{AdamState, StrategyConfig};

#[derive(Debug, Clone)]
pub struct OpenEs {
    mean: Vec<f64>,
    sigma: f64,
    adam: AdamState,
    generation: u64,
    pdf: GaussianPdf,
}

impl OpenEs {
    pub fn new(config: &StrategyConfig) -> Result<Self> {
        let pdf = GaussianPdf::isotropic(config.initial_mean.clone(), config.sigma_init)?;
        Ok(OpenEs {
            mean: config.initial_mean.clone(),
            sigma: config.sigma_init,
            adam: AdamState::new(
                config.initial_mean.len(),
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

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn generation_index(&self) -> u64 {
        self.generation
    }

    /// Estimate the utility gradient at the current mean and take one Adam
    /// ascent step. The covariance is never touched.
    pub fn tell(&mut self, samples: &[Vec<f64>], utilities: &[f64]) -> Result<()> {
        let d = self.mean.len();
        let n = samples.len() as f64;
        let inv = 1.0 / (n * self.sigma * self.sigma);
        let mut grad = vec![0.0; d];
        for (z, u) in samples.iter().zip(utilities) {
            for j in 0..d {
                grad[j] += u * (z[j] - self.mean[j]) * inv;
            }
        }
        let delta = self.adam.step(&grad)?;
        for j in 0..d {
            self.mean[j] += delta[j];
        }
        self.generation += 1;
        self.pdf = GaussianPdf::isotropic(self.mean.clone(), self.sigma)?;
        Ok(())
    }
}
