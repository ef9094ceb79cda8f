use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::panel::WindowView;
use crate::scalar::{mean, Scalar};

/// Linear-interpolation quantile of sorted data (`h = (n−1)p`).
pub fn quantile_sorted<S: Scalar>(sorted: &[S], p: S) -> S {
    let n = sorted.len();
    debug_assert!(n > 0);
    let h = S::from_usize_lossy(n - 1) * p;
    let lo = h.floor().to_usize().unwrap_or(0).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - S::from_usize_lossy(lo)) * (sorted[hi] - sorted[lo])
}

pub fn median_sorted<S: Scalar>(sorted: &[S]) -> S {
    quantile_sorted(sorted, S::lit(0.5))
}

fn sorted_copy<S: Scalar>(x: &[S]) -> Vec<S> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Median after discarding samples outside `[Q1 − 1.5·IQR, Q3 + 1.5·IQR]`.
/// The flag is set when the filter left nothing and the raw median was used.
pub fn robust_mean_return<S: Scalar>(x: &[S]) -> Result<(S, bool)> {
    if x.len() < 4 {
        return Err(Error::InsufficientData {
            what: "expected-return samples",
            needed: 4,
            got: x.len(),
        });
    }
    let sorted = sorted_copy(x);
    let q1 = quantile_sorted(&sorted, S::lit(0.25));
    let q3 = quantile_sorted(&sorted, S::lit(0.75));
    let fence = S::lit(1.5) * (q3 - q1);
    let (lo, hi) = (q1 - fence, q3 + fence);
    let kept: Vec<S> = sorted
        .iter()
        .copied()
        .filter(|&v| v >= lo && v <= hi)
        .collect();
    if kept.is_empty() {
        Ok((median_sorted(&sorted), true))
    } else {
        Ok((median_sorted(&kept), false))
    }
}

/// Sample covariance with `1/(T−1)` normalization.
pub fn covariance<S: Scalar>(series: &[&[S]]) -> Result<Matrix<S>> {
    let n = series.len();
    let t = series.first().map_or(0, |s| s.len());
    if t < 2 {
        return Err(Error::InsufficientData {
            what: "covariance samples",
            needed: 2,
            got: t,
        });
    }
    if let Some(s) = series.iter().find(|s| s.len() != t) {
        return Err(Error::DimensionMismatch {
            expected: t,
            got: s.len(),
        });
    }
    let means: Vec<S> = series.iter().map(|s| mean(s).expect("t >= 2")).collect();
    let mut cov = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let c = series[i]
                .iter()
                .zip(series[j])
                .map(|(&a, &b)| (a - means[i]) * (b - means[j]))
                .sum::<S>()
                / S::from_usize_lossy(t - 1);
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    Ok(cov)
}

/// Expected returns and covariance of one estimation window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssetStats<S> {
    pub labels: Vec<String>,
    pub returns: Vec<S>,
    pub covariance: Matrix<S>,
    /// Assets whose robust filter fell back to the raw median.
    pub fallback: Vec<usize>,
}

impl<S: Scalar> AssetStats<S> {
    /// Validates shapes, finiteness, symmetry and positive semi-definiteness
    /// (smallest eigenvalue ≥ −1e−10·trace).
    pub fn new(labels: Vec<String>, returns: Vec<S>, covariance: Matrix<S>) -> Result<Self> {
        let n = returns.len();
        if n == 0 {
            return Err(Error::InsufficientData {
                what: "assets",
                needed: 1,
                got: 0,
            });
        }
        if labels.len() != n || covariance.rows() != n || !covariance.is_square() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: covariance.rows(),
            });
        }
        if !covariance.all_finite() || returns.iter().any(|r| !r.is_finite()) {
            return Err(Error::Validation(
                "non-finite expected return or covariance".into(),
            ));
        }
        let scale = covariance.trace().abs().max(S::min_positive_value());
        for i in 0..n {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > S::lit(1e-12) * scale {
                    return Err(Error::Validation("covariance is not symmetric".into()));
                }
            }
        }
        let shift = S::lit(1e-10) * scale;
        let shifted = Matrix::from_fn(n, n, |i, j| {
            covariance[(i, j)] + if i == j { shift } else { S::zero() }
        });
        if shifted.cholesky().is_none() {
            return Err(Error::Validation(
                "covariance is not positive semi-definite".into(),
            ));
        }
        Ok(Self {
            labels,
            returns,
            covariance,
            fallback: Vec::new(),
        })
    }

    pub fn from_series(labels: &[String], series: &[&[S]]) -> Result<Self> {
        let mut returns = Vec::with_capacity(series.len());
        let mut fallback = Vec::new();
        for (i, s) in series.iter().enumerate() {
            let (r, fb) = robust_mean_return(s)?;
            if fb {
                fallback.push(i);
            }
            returns.push(r);
        }
        let mut stats = Self::new(labels.to_vec(), returns, covariance(series)?)?;
        stats.fallback = fallback;
        Ok(stats)
    }

    pub fn from_window(window: &WindowView<'_, S>) -> Result<Self> {
        let series: Vec<&[S]> = (0..window.n_series()).map(|i| window.series(i)).collect();
        Self::from_series(window.tickers(), &series)
    }

    pub fn n(&self) -> usize {
        self.returns.len()
    }
}
