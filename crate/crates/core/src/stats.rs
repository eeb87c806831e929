//! Statistical machinery for the mixing verification suite: rejection
//! sampling, under-the-curve sampling, two-sample Kolmogorov-Smirnov tests,
//! chi-square goodness of fit, and estimation of the intersection mass
//! lambda = integral of min(p_old, p_new).

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{CoreError, Result};
use crate::gaussian::{log_density_ratio, CovarianceRepr, GaussianPdf};

/// Outcome of a Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    /// Sup of the CDF gap.
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// How an overlap estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMethod {
    Quadrature1d,
    MonteCarlo,
}

/// Estimated intersection mass of two pdfs.
#[derive(Debug, Clone, Copy)]
pub struct OverlapEstimate {
    pub lambda: f64,
    pub std_error: f64,
    pub method: OverlapMethod,
}

/// Algorithm-1 rejection sampling: resample from `outer` until
/// `membership` holds, `n` times. Errors out if the empirical acceptance
/// rate drops below 1e-6 over a trial window.
pub fn rejection_sample<R, S, M>(
    mut outer: S,
    membership: M,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>>
where
    R: Rng + ?Sized,
    S: FnMut(&mut R) -> Vec<f64>,
    M: Fn(&[f64]) -> bool,
{
    const RATE_FLOOR: f64 = 1e-6;
    let mut accepted = Vec::with_capacity(n);
    let mut trials: u64 = 0;
    while accepted.len() < n {
        let x = outer(rng);
        trials += 1;
        if membership(&x) {
            accepted.push(x);
        } else if trials >= 10_000_000 && (accepted.len() as f64) < RATE_FLOOR * trials as f64 {
            return Err(CoreError::DegenerateRegion { threshold: RATE_FLOOR, trials });
        }
    }
    Ok(accepted)
}

/// Draw `(z, u * p(z))` pairs: uniform samples from the region under the
/// density curve.
pub fn under_curve_sample<R: Rng + ?Sized>(
    pdf: &GaussianPdf,
    rng: &mut R,
    n: usize,
) -> Vec<(Vec<f64>, f64)> {
    (0..n)
        .map(|_| {
            let z = pdf.sample_one(rng);
            let u: f64 = rng.random();
            let h = u * pdf.log_density_unchecked(&z).exp();
            (z, h)
        })
        .collect()
}

/// Exact two-sample KS statistic with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(CoreError::EmptySample);
    }
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    Ok(KsResult { statistic: d, p_value: kolmogorov_p(d, ne), n_a: n, n_b: m })
}

/// One-sample KS statistic of `sample` against an exact CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<KsResult> {
    if sample.is_empty() {
        return Err(CoreError::EmptySample);
    }
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let c = cdf(*x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - c).abs());
    }
    Ok(KsResult { statistic: d, p_value: kolmogorov_p(d, n), n_a: xs.len(), n_b: 0 })
}

/// Asymptotic survival function of the Kolmogorov distribution with the
/// Stephens small-sample correction.
fn kolmogorov_p(d: f64, effective_n: f64) -> f64 {
    let sq = effective_n.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    if lambda < 1e-12 {
        return 1.0;
    }
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        p += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Chi-square goodness-of-fit p-value for observed counts against expected
/// counts (degrees of freedom = cells - 1).
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<f64> {
    if observed.is_empty() || observed.len() != expected.len() {
        return Err(CoreError::EmptySample);
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| {
            let diff = *o as f64 - e;
            diff * diff / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let chi = ChiSquared::new(df).map_err(|e| CoreError::InvalidParameter(e.to_string()))?;
    Ok(1.0 - chi.cdf(stat))
}

/// Estimate the intersection mass lambda = integral of min(p_old, p_new).
/// 1D pairs use adaptive Simpson quadrature; higher dimensions use Monte
/// Carlo with `budget` draws from `p_old`.
pub fn estimate_lambda<R: Rng + ?Sized>(
    p_old: &GaussianPdf,
    p_new: &GaussianPdf,
    budget: usize,
    rng: &mut R,
) -> Result<OverlapEstimate> {
    if p_old.dim() != p_new.dim() {
        return Err(CoreError::DimensionMismatch { expected: p_old.dim(), actual: p_new.dim() });
    }
    if p_old.dim() == 1 {
        let spread = |p: &GaussianPdf| match p.cov() {
            CovarianceRepr::Isotropic(s) => *s,
            CovarianceRepr::Diagonal(v) => v[0].sqrt(),
            CovarianceRepr::FullCholesky { factor, .. } => factor[0],
        };
        let lo = (p_old.mean()[0] - 12.0 * spread(p_old)).min(p_new.mean()[0] - 12.0 * spread(p_new));
        let hi = (p_old.mean()[0] + 12.0 * spread(p_old)).max(p_new.mean()[0] + 12.0 * spread(p_new));
        let f = |x: f64| {
            let z = [x];
            p_old
                .log_density_unchecked(&z)
                .exp()
                .min(p_new.log_density_unchecked(&z).exp())
        };
        let lambda = adaptive_simpson(&f, lo, hi, 1e-11, 50);
        Ok(OverlapEstimate {
            lambda: lambda.clamp(0.0, 1.0),
            std_error: 1e-9,
            method: OverlapMethod::Quadrature1d,
        })
    } else {
        // E_{z ~ p_old}[min(1, p_new/p_old)]
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..budget {
            let z = p_old.sample_one(rng);
            let r = log_density_ratio(p_new, p_old, &z)?.min(0.0).exp();
            sum += r;
            sum_sq += r * r;
        }
        let n = budget as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Ok(OverlapEstimate {
            lambda: mean.clamp(0.0, 1.0),
            std_error: (var / n).sqrt(),
            method: OverlapMethod::MonteCarlo,
        })
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}
