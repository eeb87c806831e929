//! Oracles for the statistical toolbox itself: analytic acceptance rates,
//! brute-force recomputation of the KS statistic, and closed-form overlaps.

use esmix_core::gaussian::GaussianPdf;
use esmix_core::stats::{
    chi_square_gof, estimate_lambda, ks_two_sample, rejection_sample, under_curve_sample,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn disk_in_square_acceptance_rate_is_quarter_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 100_000;
    let mut trials = 0u64;
    let outer = |rng: &mut ChaCha8Rng| {
        vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
    };
    // count trials by re-running the membership test on an identical stream
    let points = rejection_sample(outer, |p| p[0] * p[0] + p[1] * p[1] <= 1.0, n, &mut rng).unwrap();
    assert_eq!(points.len(), n);
    let mut check = ChaCha8Rng::seed_from_u64(21);
    let mut accepted = 0u64;
    while accepted < n as u64 {
        let x: f64 = check.random_range(-1.0..1.0);
        let y: f64 = check.random_range(-1.0..1.0);
        trials += 1;
        if x * x + y * y <= 1.0 {
            accepted += 1;
        }
    }
    let rate = n as f64 / trials as f64;
    let quarter_pi = std::f64::consts::PI / 4.0;
    assert!((rate - quarter_pi).abs() < 0.005, "acceptance rate {rate} vs {quarter_pi}");
}

#[test]
fn disk_points_are_uniform_by_chi_square() {
    // 10x10 grid over [-1,1]^2, keeping only cells fully inside the disk so
    // every kept cell has equal expected mass
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let n = 100_000;
    let outer = |rng: &mut ChaCha8Rng| {
        vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
    };
    let points = rejection_sample(outer, |p| p[0] * p[0] + p[1] * p[1] <= 1.0, n, &mut rng).unwrap();

    let cell = |v: f64| (((v + 1.0) / 0.2) as usize).min(9);
    let corner_in_disk = |i: usize, j: usize| {
        // farthest corner of cell (i, j) from the origin
        let xs = [-1.0 + 0.2 * i as f64, -1.0 + 0.2 * (i + 1) as f64];
        let ys = [-1.0 + 0.2 * j as f64, -1.0 + 0.2 * (j + 1) as f64];
        let x = xs[0].abs().max(xs[1].abs());
        let y = ys[0].abs().max(ys[1].abs());
        x * x + y * y <= 1.0
    };
    let mut counts = vec![vec![0u64; 10]; 10];
    for p in &points {
        counts[cell(p[0])][cell(p[1])] += 1;
    }
    let mut observed = Vec::new();
    let mut inner_total = 0u64;
    for i in 0..10 {
        for j in 0..10 {
            if corner_in_disk(i, j) {
                observed.push(counts[i][j]);
                inner_total += counts[i][j];
            }
        }
    }
    assert!(observed.len() >= 50, "expected a meaningful number of interior cells");
    let expected = vec![inner_total as f64 / observed.len() as f64; observed.len()];
    let p = chi_square_gof(&observed, &expected).unwrap();
    assert!(p > 0.01, "uniformity rejected: p = {p}");
}

#[test]
fn rejection_sampling_with_trivial_region_accepts_everything() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let pdf = GaussianPdf::isotropic(vec![0.0], 1.0).unwrap();
    let outer = |rng: &mut ChaCha8Rng| pdf.sample_one(rng);
    let accepted = rejection_sample(outer, |_| true, 5000, &mut rng).unwrap();
    let mut direct_rng = ChaCha8Rng::seed_from_u64(23);
    let direct: Vec<f64> = (0..5000).map(|_| pdf.sample_one(&mut direct_rng)[0]).collect();
    let ours: Vec<f64> = accepted.iter().map(|p| p[0]).collect();
    assert_eq!(ours, direct);
}

#[test]
fn degenerate_region_is_a_diagnostic_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let outer = |rng: &mut ChaCha8Rng| vec![rng.random::<f64>()];
    let r = rejection_sample(outer, |_| false, 1, &mut rng);
    assert!(r.is_err());
}

#[test]
fn under_curve_heights_stay_below_density_and_marginal_is_unbiased() {
    let pdf = GaussianPdf::isotropic(vec![0.0], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let pairs = under_curve_sample(&pdf, &mut rng, 100_000);
    for (z, h) in &pairs {
        let p = pdf.log_density_unchecked(z).exp();
        assert!(*h <= p + 1e-12, "height {h} above density {p}");
        assert!(*h >= 0.0);
    }
    let marginal: Vec<f64> = pairs.iter().map(|(z, _)| z[0]).collect();
    let direct: Vec<f64> = (0..marginal.len()).map(|_| pdf.sample_one(&mut rng)[0]).collect();
    let ks = ks_two_sample(&marginal, &direct).unwrap();
    assert!(ks.p_value > 0.01, "under-curve marginal biased: p={}", ks.p_value);
}

#[test]
fn under_curve_height_scale_follows_sigma() {
    let narrow = GaussianPdf::isotropic(vec![0.0], 0.5).unwrap();
    let wide = GaussianPdf::isotropic(vec![0.0], 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let max_h = |pdf: &GaussianPdf, rng: &mut ChaCha8Rng| {
        under_curve_sample(pdf, rng, 20_000)
            .iter()
            .map(|(_, h)| *h)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let hn = max_h(&narrow, &mut rng);
    let hw = max_h(&wide, &mut rng);
    // peak density scales as 1/sigma
    assert!(hn > 2.0 * hw, "narrow peak {hn} vs wide peak {hw}");
}

#[test]
fn ks_statistic_matches_double_loop_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let a: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
    let b: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 1.3 - 0.1).collect();
    let ks = ks_two_sample(&a, &b).unwrap();
    // brute force: evaluate both empirical CDFs at every sample point
    let ecdf = |s: &[f64], x: f64| s.iter().filter(|v| **v <= x).count() as f64 / s.len() as f64;
    let mut d_max: f64 = 0.0;
    for x in a.iter().chain(b.iter()) {
        d_max = d_max.max((ecdf(&a, *x) - ecdf(&b, *x)).abs());
    }
    assert!((ks.statistic - d_max).abs() < 1e-12, "{} vs {d_max}", ks.statistic);
}

#[test]
fn ks_separates_distant_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let a = GaussianPdf::isotropic(vec![0.0], 1.0).unwrap();
    let b = GaussianPdf::isotropic(vec![3.0], 1.0).unwrap();
    let xs: Vec<f64> = (0..1000).map(|_| a.sample_one(&mut rng)[0]).collect();
    let ys: Vec<f64> = (0..1000).map(|_| b.sample_one(&mut rng)[0]).collect();
    let ks = ks_two_sample(&xs, &ys).unwrap();
    assert!(ks.p_value < 1e-6, "p = {}", ks.p_value);
}

#[test]
fn lambda_of_identical_pdfs_is_one_and_distant_pdfs_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let p = GaussianPdf::isotropic(vec![0.0], 1.0).unwrap();
    let same = estimate_lambda(&p, &p, 0, &mut rng).unwrap();
    assert!((same.lambda - 1.0).abs() < 1e-8, "lambda {}", same.lambda);

    let far = GaussianPdf::isotropic(vec![1e6], 1.0).unwrap();
    let apart = estimate_lambda(&p, &far, 0, &mut rng).unwrap();
    assert!(apart.lambda < 1e-12, "lambda {}", apart.lambda);
}

#[test]
fn monte_carlo_lambda_agrees_with_quadrature_on_a_product_pair() {
    // 2D diagonal pair where the overlap factorizes into 1D overlaps
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let p_old = GaussianPdf::diagonal(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let p_new = GaussianPdf::diagonal(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
    let mc = estimate_lambda(&p_old, &p_new, 400_000, &mut rng).unwrap();
    let q1 = estimate_lambda(
        &GaussianPdf::isotropic(vec![0.0], 1.0).unwrap(),
        &GaussianPdf::isotropic(vec![0.5], 1.0).unwrap(),
        0,
        &mut rng,
    )
    .unwrap();
    // E[min(1, r1 r2)] != (E[min(1, r1)])^2 in general, but for equal shifts
    // the Monte Carlo estimate must sit between lambda1^2 and lambda1
    assert!(mc.lambda < q1.lambda + 3.0 * mc.std_error);
    assert!(mc.lambda > q1.lambda * q1.lambda - 3.0 * mc.std_error);
}

#[test]
fn covariance_representations_sample_the_same_distribution() {
    let mean = vec![0.3, -0.7, 1.1];
    let iso = GaussianPdf::isotropic(mean.clone(), 0.8).unwrap();
    let diag = GaussianPdf::diagonal(mean.clone(), vec![0.64; 3]).unwrap();
    let full = GaussianPdf::full_from_covariance(
        mean.clone(),
        vec![0.64, 0.0, 0.0, 0.0, 0.64, 0.0, 0.0, 0.0, 0.64],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n = 50_000;
    let draws: Vec<Vec<Vec<f64>>> =
        [&iso, &diag, &full].iter().map(|p| p.sample(&mut rng, n)).collect();
    let alpha = 0.01 / 9.0; // Bonferroni across 3 pairs x 3 marginals
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        for j in 0..3 {
            let xs: Vec<f64> = draws[a].iter().map(|s| s[j]).collect();
            let ys: Vec<f64> = draws[b].iter().map(|s| s[j]).collect();
            let ks = ks_two_sample(&xs, &ys).unwrap();
            assert!(ks.p_value > alpha, "pair ({a},{b}) marginal {j}: p={}", ks.p_value);
        }
    }
}
