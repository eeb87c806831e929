//! Cross-entropy method: the K_e fittest individuals define the next mean
//! and per-coordinate variance, plus a decaying extra variance floor that
//! staves off premature convergence.

use crate::error::Result;
use crate::gaussian::GaussianPdf;

use super::StrategyConfig;

#[derive(Debug, Clone)]
pub struct Cem {
    mean: Vec<f64>,
    variances: Vec<f64>,
    elite_count: usize,
    extra_variance: f64,
    extra_decay: f64,
    extra_floor: f64,
    generation: u64,
    pdf: GaussianPdf,
}

impl Cem {
    pub fn new(config: &StrategyConfig) -> Result<Self> {
        let d = config.initial_mean.len();
        let variances = vec![config.sigma_init * config.sigma_init; d];
        let pdf = GaussianPdf::diagonal(config.initial_mean.clone(), variances.clone())?;
        Ok(Cem {
            mean: config.initial_mean.clone(),
            variances,
            elite_count: config.elite_count(),
            extra_variance: config.cem_extra_variance,
            extra_decay: config.cem_extra_decay,
            extra_floor: config.cem_extra_floor,
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

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn extra_variance(&self) -> f64 {
        self.extra_variance
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
        let elites = &order[..self.elite_count.min(order.len())];
        let ke = elites.len() as f64;

        let mut mean = vec![0.0; d];
        for &i in elites {
            for j in 0..d {
                mean[j] += samples[i][j];
            }
        }
        for m in mean.iter_mut() {
            *m /= ke;
        }
        let mut variances = vec![0.0; d];
        for &i in elites {
            for j in 0..d {
                let diff = samples[i][j] - mean[j];
                variances[j] += diff * diff;
            }
        }
        for v in variances.iter_mut() {
            *v = *v / ke + self.extra_variance;
        }

        self.mean = mean;
        self.variances = variances;
        self.extra_variance = (self.extra_variance * self.extra_decay).max(self.extra_floor);
        self.generation += 1;
        self.pdf = GaussianPdf::diagonal(self.mean.clone(), self.variances.clone())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::Algorithm;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn config(d: usize, n: usize) -> StrategyConfig {
        StrategyConfig::new(Algorithm::Cem, vec![0.0; d], n)
    }

    #[test]
    fn identical_elites_collapse_to_extra_variance() {
        let mut cem = Cem::new(&config(2, 4)).unwrap();
        let extra = cem.extra_variance();
        let p = vec![1.5, -0.5];
        let samples = vec![p.clone(), p.clone(), vec![9.0, 9.0], vec![-9.0, -9.0]];
        // the two copies of p are the elites
        cem.tell(&samples, &[0.5, 0.25, -0.25, -0.5]).unwrap();
        assert_eq!(cem.mean(), p.as_slice());
        for v in cem.variances() {
            assert_abs_diff_eq!(*v, extra, epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_full_population_elite() {
        let mut cfg = config(1, 4);
        cfg.elite_count = Some(4);
        let mut cem = Cem::new(&cfg).unwrap();
        let extra = cem.extra_variance();
        let samples = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        cem.tell(&samples, &[0.5, 1.0 / 6.0, -1.0 / 6.0, -0.5]).unwrap();
        assert_abs_diff_eq!(cem.mean()[0], 2.5, epsilon = 1e-12);
        // population variance around 2.5 is 1.25
        assert_abs_diff_eq!(cem.variances()[0], 1.25 + extra, epsilon = 1e-12);
    }

    #[test]
    fn elite_moments_match_two_pass_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = 5;
        let n = 20;
        let mut cfg = config(d, n);
        cfg.elite_count = Some(7);
        let mut cem = Cem::new(&cfg).unwrap();
        let extra = cem.extra_variance();
        let pdf = GaussianPdf::isotropic(vec![0.0; d], 1.0).unwrap();
        let samples = pdf.sample(&mut rng, n);
        let fitness: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let utilities = crate::strategies::rank_transform(&fitness).unwrap();
        cem.tell(&samples, &utilities).unwrap();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fitness[b].partial_cmp(&fitness[a]).unwrap());
        let elites = &order[..7];
        for j in 0..d {
            let mean: f64 = elites.iter().map(|&i| samples[i][j]).sum::<f64>() / 7.0;
            let var: f64 =
                elites.iter().map(|&i| (samples[i][j] - mean).powi(2)).sum::<f64>() / 7.0;
            assert_abs_diff_eq!(cem.mean()[j], mean, epsilon = 1e-12);
            assert_abs_diff_eq!(cem.variances()[j], var + extra, epsilon = 1e-12);
        }
    }

    #[test]
    fn variance_floor_holds_and_extra_decays() {
        let mut cem = Cem::new(&config(1, 4)).unwrap();
        let samples = vec![vec![0.0], vec![0.1], vec![-0.1], vec![0.2]];
        let mut prev_extra = cem.extra_variance();
        for _ in 0..2000 {
            cem.tell(&samples, &[0.5, 1.0 / 6.0, -1.0 / 6.0, -0.5]).unwrap();
            let extra = cem.extra_variance();
            assert!(extra <= prev_extra);
            assert!(extra >= 1e-6);
            for v in cem.variances() {
                assert!(*v >= extra);
            }
            prev_extra = extra;
        }
        assert_abs_diff_eq!(prev_extra, 1e-6, epsilon = 1e-18);
    }
}
