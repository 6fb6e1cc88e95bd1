use serde::{Deserialize, Serialize};

use super::{DistributionSpec, NaturaliseError};

/// Bivariate Gaussian over (length, depth).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianFit {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self, NaturaliseError> {
        let fit = GaussianFit { mean, cov };
        if (cov[0][1] - cov[1][0]).abs() > 1e-12 * (1.0 + cov[0][1].abs()) || !fit.is_positive_definite() {
            return Err(NaturaliseError::SingularCovariance);
        }
        Ok(fit)
    }

    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    fn is_positive_definite(&self) -> bool {
        self.cov[0][0] > 0.0 && self.det() > 0.0 && self.det().is_finite()
    }

    fn inverse(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        [[self.cov[1][1] / d, -self.cov[0][1] / d], [-self.cov[1][0] / d, self.cov[0][0] / d]]
    }
}

/// Weighted sample mean, unbiased covariance and total weight.
fn moments(points: impl Iterator<Item = ([f64; 2], f64)> + Clone) -> ([f64; 2], [[f64; 2]; 2], f64) {
    let n: f64 = points.clone().map(|(_, w)| w).sum();
    let mut mean = [0.0; 2];
    for (p, w) in points.clone() {
        mean[0] += w * p[0] / n;
        mean[1] += w * p[1] / n;
    }
    let mut cov = [[0.0; 2]; 2];
    if n > 1.0 {
        for (p, w) in points {
            let d = [p[0] - mean[0], p[1] - mean[1]];
            for i in 0..2 {
                for j in 0..2 {
                    cov[i][j] += w * d[i] * d[j] / (n - 1.0);
                }
            }
        }
    }
    (mean, cov, n)
}

fn fit_weighted(points: impl Iterator<Item = ([f64; 2], f64)> + Clone) -> Result<GaussianFit, NaturaliseError> {
    let (mean, cov, n) = moments(points);
    if n < 3.0 {
        return Err(NaturaliseError::DegenerateCovariance);
    }
    let fit = GaussianFit { mean, cov };
    // relative threshold: perfectly correlated or constant features
    let scale = (cov[0][0] * cov[1][1]).max(f64::MIN_POSITIVE);
    if !fit.is_positive_definite() || fit.det() / scale < 1e-12 {
        return Err(NaturaliseError::DegenerateCovariance);
    }
    Ok(fit)
}

/// Variance of a unit-width uniform: the spread an integer value stands for.
const DISCRETISATION_VARIANCE: f64 = 1.0 / 12.0;

/// Like [`fit_weighted`], but each integer point is read as covering a unit
/// cell, which adds 1/12 to both variances. Defined for any non-empty input,
/// including a single repeated value.
fn fit_weighted_discretised(
    points: impl Iterator<Item = ([f64; 2], f64)> + Clone,
) -> Result<GaussianFit, NaturaliseError> {
    let (mean, mut cov, n) = moments(points);
    if n <= 0.0 {
        return Err(NaturaliseError::DegenerateCovariance);
    }
    cov[0][0] += DISCRETISATION_VARIANCE;
    cov[1][1] += DISCRETISATION_VARIANCE;
    GaussianFit::new(mean, cov).map_err(|_| NaturaliseError::DegenerateCovariance)
}

fn feature_points(features: &[(usize, usize)]) -> impl Iterator<Item = ([f64; 2], f64)> + Clone + '_ {
    features.iter().map(|&(l, d)| ([l as f64, d as f64], 1.0))
}

fn spec_points(spec: &DistributionSpec) -> impl Iterator<Item = ([f64; 2], f64)> + Clone + '_ {
    spec.entries().iter().map(|e| ([e.length as f64, e.depth as f64], e.count as f64))
}

/// Sample mean and unbiased covariance.
pub fn fit_gaussian(features: &[(usize, usize)]) -> Result<GaussianFit, NaturaliseError> {
    fit_weighted(feature_points(features))
}

/// Fit to a histogram, treating counts as frequency weights.
pub fn fit_spec(spec: &DistributionSpec) -> Result<GaussianFit, NaturaliseError> {
    fit_weighted(spec_points(spec))
}

/// [`fit_gaussian`] with the unit-cell correction; used where the features
/// may legitimately collapse onto one value.
pub fn fit_gaussian_discretised(features: &[(usize, usize)]) -> Result<GaussianFit, NaturaliseError> {
    fit_weighted_discretised(feature_points(features))
}

/// [`fit_spec`] with the unit-cell correction.
pub fn fit_spec_discretised(spec: &DistributionSpec) -> Result<GaussianFit, NaturaliseError> {
    fit_weighted_discretised(spec_points(spec))
}

/// Closed-form KL(p ‖ q) between bivariate Gaussians.
pub fn kl_gaussian(p: &GaussianFit, q: &GaussianFit) -> Result<f64, NaturaliseError> {
    if !p.is_positive_definite() || !q.is_positive_definite() {
        return Err(NaturaliseError::SingularCovariance);
    }
    let qi = q.inverse();
    let trace = qi[0][0] * p.cov[0][0] + qi[0][1] * p.cov[1][0] + qi[1][0] * p.cov[0][1] + qi[1][1] * p.cov[1][1];
    let d = [q.mean[0] - p.mean[0], q.mean[1] - p.mean[1]];
    let mut quad = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            quad += d[i] * qi[i][j] * d[j];
        }
    }
    let kl = 0.5 * (trace + quad - 2.0 + (q.det() / p.det()).ln());
    // exact zero for identical inputs; clamp rounding noise below zero
    Ok(kl.max(0.0))
}
