//! Strategy-level oracles: an independent transcription of the CMA-ES
//! update, closed-form gradient checks for OpenES and SNES estimators, and
//! convergence of all four strategies on a sphere objective.

use esmix_core::gaussian::GaussianPdf;
use esmix_core::strategies::{rank_transform, Algorithm, CmaEs, Strategy, StrategyConfig};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Straight-line transcription of the standard (mu/mu_w, lambda) CMA-ES
/// update, written against the published tutorial formulas with plain
/// loops. Used only as an oracle.
struct CmaReference {
    d: usize,
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    p_sigma: DVector<f64>,
    p_c: DVector<f64>,
    weights: Vec<f64>,
    mu: usize,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
    gen: i32,
}

impl CmaReference {
    fn new(d: usize, mu: usize, mean: Vec<f64>, sigma: f64) -> Self {
        let df = d as f64;
        let mut weights: Vec<f64> =
            (1..=mu).map(|i| ((mu as f64) + 0.5).ln() - (i as f64).ln()).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (df + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (df + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / df) / (df + 4.0 + 2.0 * mu_eff / df);
        let c_1 = 2.0 / ((df + 1.3).powi(2) + mu_eff);
        let c_mu =
            (2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((df + 2.0).powi(2) + mu_eff)).min(1.0 - c_1);
        let chi_n = df.sqrt() * (1.0 - 1.0 / (4.0 * df) + 1.0 / (21.0 * df * df));
        CmaReference {
            d,
            mean: DVector::from_vec(mean),
            sigma,
            cov: DMatrix::identity(d, d),
            p_sigma: DVector::zeros(d),
            p_c: DVector::zeros(d),
            weights,
            mu,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
            gen: 0,
        }
    }

    fn update(&mut self, samples: &[Vec<f64>], utilities: &[f64]) {
        let d = self.d;
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| {
            utilities[b].partial_cmp(&utilities[a]).unwrap().then(a.cmp(&b))
        });

        let ys: Vec<DVector<f64>> = order[..self.mu]
            .iter()
            .map(|&i| (DVector::from_column_slice(&samples[i]) - &self.mean) / self.sigma)
            .collect();
        let mut y_w: DVector<f64> = DVector::zeros(d);
        for k in 0..self.mu {
            y_w += &ys[k] * self.weights[k];
        }
        let new_mean = &self.mean + &y_w * self.sigma;

        let eig = nalgebra::SymmetricEigen::new(self.cov.clone());
        let mut inv = eig.eigenvalues.clone();
        inv.iter_mut().for_each(|v| *v = 1.0 / v.max(1e-20).sqrt());
        let c_inv_sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose();

        let cs = self.c_sigma;
        self.p_sigma =
            &self.p_sigma * (1.0 - cs) + c_inv_sqrt * &y_w * (cs * (2.0 - cs) * self.mu_eff).sqrt();
        self.gen += 1;
        let ps_norm = self.p_sigma.norm();
        let decay = 1.0 - (1.0 - cs).powi(2 * self.gen);
        let h = if ps_norm / decay.sqrt() < (1.4 + 2.0 / (d as f64 + 1.0)) * self.chi_n {
            1.0
        } else {
            0.0
        };
        let cc = self.c_c;
        self.p_c = &self.p_c * (1.0 - cc) + &y_w * (h * (cc * (2.0 - cc) * self.mu_eff).sqrt());

        let mut rank_mu: DMatrix<f64> = DMatrix::zeros(d, d);
        for k in 0..self.mu {
            rank_mu += &ys[k] * ys[k].transpose() * self.weights[k];
        }
        let delta_h = (1.0 - h) * cc * (2.0 - cc);
        self.cov = &self.cov * (1.0 - self.c_1 - self.c_mu)
            + (&self.p_c * self.p_c.transpose() + &self.cov * delta_h) * self.c_1
            + rank_mu * self.c_mu;
        self.sigma *= ((cs / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();
        self.mean = new_mean;
    }
}

#[test]
fn cma_es_matches_independent_transcription() {
    let d = 3;
    let n = 8;
    let mut cfg = StrategyConfig::new(Algorithm::CmaEs, vec![0.5; d], n);
    cfg.sigma_init = 0.7;
    cfg.elite_count = Some(4);
    let mut es = CmaEs::new(&cfg).unwrap();
    let mut reference = CmaReference::new(d, 4, vec![0.5; d], 0.7);

    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..5 {
        let pdf = es.ask();
        let samples = pdf.sample(&mut rng, n);
        let fitness: Vec<f64> =
            samples.iter().map(|s| -s.iter().map(|x| (x - 1.0) * (x - 1.0)).sum::<f64>()).collect();
        let utilities = rank_transform(&fitness).unwrap();
        es.tell(&samples, &utilities).unwrap();
        reference.update(&samples, &utilities);

        assert!((es.sigma() - reference.sigma).abs() < 1e-8, "sigma diverged");
        for j in 0..d {
            assert!((es.mean()[j] - reference.mean[j]).abs() < 1e-8, "mean diverged");
        }
        for i in 0..d {
            for j in 0..d {
                assert!(
                    (es.covariance()[(i, j)] - reference.cov[(i, j)]).abs() < 1e-8,
                    "covariance diverged at ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn open_es_estimator_direction_matches_analytic_gradient() {
    // f(z) = -(z-t)' A (z-t) with A = diag(1, 3); grad E[f] = -2 A (mu - t)
    let mu = [1.0, -0.5];
    let t = [2.0, 1.0];
    let a = [1.0, 3.0];
    let sigma = 0.3;
    let analytic: [f64; 2] = [-2.0 * a[0] * (mu[0] - t[0]), -2.0 * a[1] * (mu[1] - t[1])];
    let analytic_norm = (analytic[0] * analytic[0] + analytic[1] * analytic[1]).sqrt();

    let pdf = GaussianPdf::isotropic(mu.to_vec(), sigma).unwrap();
    let n = 10_000;
    let mut total_angle = 0.0;
    let seeds = 100;
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let samples = pdf.sample(&mut rng, n);
        let mut g = [0.0, 0.0];
        for z in &samples {
            let f = -(a[0] * (z[0] - t[0]).powi(2) + a[1] * (z[1] - t[1]).powi(2));
            g[0] += f * (z[0] - mu[0]);
            g[1] += f * (z[1] - mu[1]);
        }
        let scale = 1.0 / (n as f64 * sigma * sigma);
        g[0] *= scale;
        g[1] *= scale;
        let g_norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
        let cos = (g[0] * analytic[0] + g[1] * analytic[1]) / (g_norm * analytic_norm);
        total_angle += cos.clamp(-1.0, 1.0).acos().to_degrees();
    }
    let mean_angle = total_angle / seeds as f64;
    assert!(mean_angle < 15.0, "mean angle {mean_angle} degrees");
}

#[test]
fn snes_natural_gradient_matches_closed_form_on_linear_fitness() {
    // f(z) = b' z with z = mu + sigma * s: the natural gradient for the mean
    // is sigma^2 * b componentwise
    let b = [1.0, 2.0, -1.0];
    let sigmas = [0.5, 1.0, 2.0];
    let mu = [0.2, -0.3, 0.4];
    let n = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let pdf =
        GaussianPdf::diagonal(mu.to_vec(), sigmas.iter().map(|s| s * s).collect()).unwrap();
    let samples = pdf.sample(&mut rng, n);
    let mut g = [0.0; 3];
    for z in &samples {
        let f: f64 = b.iter().zip(z.iter()).map(|(bi, zi)| bi * zi).sum();
        for j in 0..3 {
            let s = (z[j] - mu[j]) / sigmas[j];
            g[j] += f * s;
        }
    }
    for j in 0..3 {
        g[j] = sigmas[j] * g[j] / n as f64;
        let expected = sigmas[j] * sigmas[j] * b[j];
        assert!(
            (g[j] - expected).abs() < 0.05 * expected.abs().max(1.0),
            "component {j}: {} vs {expected}",
            g[j]
        );
    }
}

#[test]
fn all_four_strategies_descend_a_ten_dimensional_sphere() {
    let d = 10;
    let n = 40;
    let sphere = |z: &[f64]| -z.iter().map(|x| x * x).sum::<f64>();
    for algorithm in [Algorithm::OpenEs, Algorithm::Snes, Algorithm::Cem, Algorithm::CmaEs] {
        let mut cfg = StrategyConfig::new(algorithm, vec![2.0; d], n);
        cfg.sigma_init = 0.5;
        // shorter momentum window than the benchmark default so the mean does
        // not overshoot on this fast-converging toy objective
        cfg.learning_rate = 0.05;
        cfg.adam_beta1 = 0.9;
        cfg.elite_count = Some(20);
        let mut strategy = Strategy::new(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let initial = sphere(strategy.mean());
        for _ in 0..300 {
            let pdf = strategy.ask();
            let samples = pdf.sample(&mut rng, n);
            let fitness: Vec<f64> = samples.iter().map(|s| sphere(s)).collect();
            let utilities = rank_transform(&fitness).unwrap();
            strategy.tell(&samples, &utilities).unwrap();
        }
        let final_value = sphere(strategy.mean());
        assert!(
            final_value > initial / 10.0,
            "{algorithm}: started at {initial}, ended at {final_value}"
        );
    }
}
