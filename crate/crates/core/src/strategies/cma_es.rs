//! (mu/mu_w, lambda)-CMA-ES with the standard constant settings
//! parameterized by the dimension and the elite count: log-rank recombination
//! weights, cumulation paths for step size and rank-1 covariance update, and
//! a rank-mu update from the elite steps. The search distribution handed to
//! the mixing layer is refreshed as a Cholesky factor after every update.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::gaussian::GaussianPdf;

use super::StrategyConfig;

#[derive(Debug, Clone)]
pub struct CmaEs {
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    path_sigma: DVector<f64>,
    path_cov: DVector<f64>,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_cov_path: f64,
    c_rank_one: f64,
    c_rank_mu: f64,
    chi_n: f64,
    elite_count: usize,
    generation: u64,
    mean_vec: Vec<f64>,
    pdf: GaussianPdf,
}

impl CmaEs {
    pub fn new(config: &StrategyConfig) -> Result<Self> {
        let d = config.initial_mean.len();
        let df = d as f64;
        let mu = config.elite_count();
        let muf = mu as f64;

        let mut weights: Vec<f64> = (0..mu)
            .map(|i| (muf + 0.5).ln() - ((i + 1) as f64).ln())
            .collect();
        let wsum: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= wsum;
        }
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mu_eff + 2.0) / (df + mu_eff + 5.0);
        let d_sigma =
            1.0 + 2.0 * (((mu_eff - 1.0) / (df + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_cov_path = (4.0 + mu_eff / df) / (df + 4.0 + 2.0 * mu_eff / df);
        let c_rank_one = 2.0 / ((df + 1.3) * (df + 1.3) + mu_eff);
        let c_rank_mu = (2.0 * (mu_eff - 2.0 + 1.0 / mu_eff)
            / ((df + 2.0) * (df + 2.0) + mu_eff))
            .min(1.0 - c_rank_one);
        let chi_n = df.sqrt() * (1.0 - 1.0 / (4.0 * df) + 1.0 / (21.0 * df * df));

        let mean = DVector::from_column_slice(&config.initial_mean);
        let cov = DMatrix::identity(d, d);
        let pdf = Self::build_pdf(&mean, config.sigma_init, &cov)?;
        Ok(CmaEs {
            mean,
            sigma: config.sigma_init,
            cov,
            path_sigma: DVector::zeros(d),
            path_cov: DVector::zeros(d),
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_cov_path,
            c_rank_one,
            c_rank_mu,
            chi_n,
            elite_count: mu,
            generation: 0,
            mean_vec: config.initial_mean.clone(),
            pdf,
        })
    }

    fn build_pdf(mean: &DVector<f64>, sigma: f64, cov: &DMatrix<f64>) -> Result<GaussianPdf> {
        let d = mean.len();
        let scaled = cov * (sigma * sigma);
        let mut flat = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                flat[i * d + j] = scaled[(i, j)];
            }
        }
        GaussianPdf::full_from_covariance(mean.iter().copied().collect(), flat)
    }

    pub fn ask(&self) -> GaussianPdf {
        self.pdf.clone()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean_vec
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn path_sigma_norm(&self) -> f64 {
        self.path_sigma.norm()
    }

    pub fn generation_index(&self) -> u64 {
        self.generation
    }

    pub fn tell(&mut self, samples: &[Vec<f64>], utilities: &[f64]) -> Result<()> {
        let d = self.mean.len();
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| {
            utilities[b]
                .partial_cmp(&utilities[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mu = self.elite_count.min(order.len());

        // elite steps in sigma-normalized coordinates
        let ys: Vec<DVector<f64>> = order[..mu]
            .iter()
            .map(|&i| {
                (DVector::from_column_slice(&samples[i]) - &self.mean) / self.sigma
            })
            .collect();
        let mut y_w = DVector::zeros(d);
        for (w, y) in self.weights.iter().zip(&ys) {
            y_w += y * *w;
        }

        let new_mean = &self.mean + &y_w * self.sigma;

        // C^{-1/2} via symmetric eigendecomposition
        let eig = nalgebra::SymmetricEigen::new(self.cov.clone());
        let mut inv_sqrt_vals = eig.eigenvalues.clone();
        for v in inv_sqrt_vals.iter_mut() {
            *v = 1.0 / v.max(1e-20).sqrt();
        }
        let inv_sqrt_c =
            &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt_vals) * eig.eigenvectors.transpose();

        let cs = self.c_sigma;
        self.path_sigma = &self.path_sigma * (1.0 - cs)
            + inv_sqrt_c * &y_w * (cs * (2.0 - cs) * self.mu_eff).sqrt();

        self.generation += 1;
        let ps_norm = self.path_sigma.norm();
        let decay = 1.0 - (1.0 - cs).powi(2 * self.generation as i32);
        let h_sigma = if ps_norm / decay.sqrt() < (1.4 + 2.0 / (d as f64 + 1.0)) * self.chi_n {
            1.0
        } else {
            0.0
        };

        let cc = self.c_cov_path;
        self.path_cov = &self.path_cov * (1.0 - cc)
            + &y_w * (h_sigma * (cc * (2.0 - cc) * self.mu_eff).sqrt());

        let c1 = self.c_rank_one;
        let cmu = self.c_rank_mu;
        let mut rank_mu = DMatrix::zeros(d, d);
        for (w, y) in self.weights.iter().zip(&ys) {
            rank_mu += y * y.transpose() * *w;
        }
        let delta_h = (1.0 - h_sigma) * cc * (2.0 - cc);
        self.cov = &self.cov * (1.0 - c1 - cmu)
            + (&self.path_cov * self.path_cov.transpose() + &self.cov * delta_h) * c1
            + rank_mu * cmu;

        self.sigma *= ((cs / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();
        self.mean = new_mean;
        self.mean_vec = self.mean.iter().copied().collect();
        self.pdf = Self::build_pdf(&self.mean, self.sigma, &self.cov)?;
        Ok(())
    }
}
