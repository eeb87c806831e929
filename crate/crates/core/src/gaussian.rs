//! Multivariate Gaussian sampling and log-density arithmetic.
//!
//! Three covariance representations are supported: isotropic (scalar sigma),
//! diagonal (per-coordinate variances) and full covariance stored as a lower
//! Cholesky factor. Density ratios used by the acceptance rules are always
//! formed in log space so they stay finite in high dimension.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{CoreError, Result};

const LN_2PI: f64 = 1.8378770664093453;

/// Covariance of a Gaussian search distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceRepr {
    /// sigma^2 * I with sigma > 0.
    Isotropic(f64),
    /// Per-coordinate variances, all > 0.
    Diagonal(Vec<f64>),
    /// Lower-triangular L with strictly positive diagonal; Sigma = L L^T.
    /// Stored row-major, d*d entries (upper part zero).
    FullCholesky { dim: usize, factor: Vec<f64> },
}

/// A multivariate Gaussian `N(mean, Sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPdf {
    mean: Vec<f64>,
    cov: CovarianceRepr,
}

impl GaussianPdf {
    pub fn isotropic(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "isotropic sigma must be a positive finite real, got {sigma}"
            )));
        }
        if mean.is_empty() {
            return Err(CoreError::InvalidParameter("mean must be non-empty".into()));
        }
        Ok(Self { mean, cov: CovarianceRepr::Isotropic(sigma) })
    }

    pub fn diagonal(mean: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if mean.len() != variances.len() {
            return Err(CoreError::DimensionMismatch {
                expected: mean.len(),
                actual: variances.len(),
            });
        }
        if mean.is_empty() {
            return Err(CoreError::InvalidParameter("mean must be non-empty".into()));
        }
        if let Some(v) = variances.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(CoreError::InvalidParameter(format!(
                "diagonal variances must be positive finite reals, got {v}"
            )));
        }
        Ok(Self { mean, cov: CovarianceRepr::Diagonal(variances) })
    }

    /// Build from an explicit lower Cholesky factor (row-major, d*d).
    pub fn full_from_cholesky(mean: Vec<f64>, factor: Vec<f64>) -> Result<Self> {
        let d = mean.len();
        if factor.len() != d * d {
            return Err(CoreError::DimensionMismatch { expected: d * d, actual: factor.len() });
        }
        for i in 0..d {
            if !(factor[i * d + i] > 0.0) || !factor[i * d + i].is_finite() {
                return Err(CoreError::InvalidParameter(format!(
                    "Cholesky diagonal entry {i} must be strictly positive"
                )));
            }
            for j in (i + 1)..d {
                if factor[i * d + j] != 0.0 {
                    return Err(CoreError::InvalidParameter(format!(
                        "Cholesky factor must be lower triangular, entry ({i},{j}) is nonzero"
                    )));
                }
            }
        }
        Ok(Self { mean, cov: CovarianceRepr::FullCholesky { dim: d, factor } })
    }

    /// Build from a full covariance matrix (row-major, d*d), factoring it.
    /// A near-singular matrix gets a diagonal jitter of `1e-10 * trace / d`
    /// before a second factorization attempt.
    pub fn full_from_covariance(mean: Vec<f64>, cov: Vec<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.len() != d * d {
            return Err(CoreError::DimensionMismatch { expected: d * d, actual: cov.len() });
        }
        let factor = match cholesky_lower(&cov, d) {
            Ok(l) => l,
            Err(_) => {
                let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();
                let jitter = 1e-10 * trace / d as f64;
                let mut repaired = cov;
                for i in 0..d {
                    repaired[i * d + i] += jitter;
                }
                cholesky_lower(&repaired, d)?
            }
        };
        Self::full_from_cholesky(mean, factor)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &CovarianceRepr {
        &self.cov
    }

    /// ln p(z) = -1/2 [d ln(2 pi) + ln det Sigma + (z-mu)^T Sigma^-1 (z-mu)].
    pub fn log_density(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(CoreError::DimensionMismatch { expected: self.dim(), actual: z.len() });
        }
        Ok(self.log_density_unchecked(z))
    }

    /// Like [`log_density`](Self::log_density) but skips the dimension check;
    /// callers in hot loops validate once up front.
    pub fn log_density_unchecked(&self, z: &[f64]) -> f64 {
        let d = self.dim();
        match &self.cov {
            CovarianceRepr::Isotropic(sigma) => {
                let inv_var = 1.0 / (sigma * sigma);
                let quad: f64 = z
                    .iter()
                    .zip(&self.mean)
                    .map(|(zi, mi)| (zi - mi) * (zi - mi))
                    .sum::<f64>()
                    * inv_var;
                let log_det = 2.0 * d as f64 * sigma.ln();
                -0.5 * (d as f64 * LN_2PI + log_det + quad)
            }
            CovarianceRepr::Diagonal(vars) => {
                let mut log_det = 0.0;
                let mut quad = 0.0;
                for ((zi, mi), vi) in z.iter().zip(&self.mean).zip(vars) {
                    log_det += vi.ln();
                    quad += (zi - mi) * (zi - mi) / vi;
                }
                -0.5 * (d as f64 * LN_2PI + log_det + quad)
            }
            CovarianceRepr::FullCholesky { dim, factor } => {
                // Solve L y = z - mu; quad form is |y|^2, log det = 2 sum ln L_ii.
                let mut y = vec![0.0; *dim];
                for i in 0..*dim {
                    let mut s = z[i] - self.mean[i];
                    for j in 0..i {
                        s -= factor[i * dim + j] * y[j];
                    }
                    y[i] = s / factor[i * dim + i];
                }
                let quad: f64 = y.iter().map(|v| v * v).sum();
                let log_det: f64 = (0..*dim).map(|i| 2.0 * factor[i * dim + i].ln()).sum();
                -0.5 * (*dim as f64 * LN_2PI + log_det + quad)
            }
        }
    }

    /// Draw `n` i.i.d. rows `mu + L eps` with `eps` standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        match &self.cov {
            CovarianceRepr::Isotropic(sigma) => (0..d)
                .map(|i| {
                    let e: f64 = rng.sample(StandardNormal);
                    self.mean[i] + sigma * e
                })
                .collect(),
            CovarianceRepr::Diagonal(vars) => (0..d)
                .map(|i| {
                    let e: f64 = rng.sample(StandardNormal);
                    self.mean[i] + vars[i].sqrt() * e
                })
                .collect(),
            CovarianceRepr::FullCholesky { dim, factor } => {
                let eps: Vec<f64> = (0..*dim).map(|_| rng.sample(StandardNormal)).collect();
                (0..*dim)
                    .map(|i| {
                        let mut s = self.mean[i];
                        for j in 0..=i {
                            s += factor[i * dim + j] * eps[j];
                        }
                        s
                    })
                    .collect()
            }
        }
    }
}

/// ln p_new(z) - ln p_old(z), never exponentiating intermediate densities.
pub fn log_density_ratio(p_new: &GaussianPdf, p_old: &GaussianPdf, z: &[f64]) -> Result<f64> {
    if p_new.dim() != p_old.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: p_new.dim(),
            actual: p_old.dim(),
        });
    }
    Ok(p_new.log_density(z)? - p_old.log_density(z)?)
}

/// Plain Cholesky factorization of a row-major symmetric matrix.
/// Fails if a pivot is not strictly positive.
pub fn cholesky_lower(a: &[f64], d: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(CoreError::NotPositiveDefinite);
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Ok(l)
}
