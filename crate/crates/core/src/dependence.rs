//! Pairwise dependency measures: Pearson correlation and histogram-based
//! normalized mutual information, plus their distance transforms.
//!
//! Binning is equal-width over each series' own `[min, max]`; the same bin
//! assignment feeds the marginal and the joint histogram, so
//! `I = H(X) + H(Y) − H(X,Y)` is exact for the discrete distribution and the
//! normalized value `I / √(H(X)H(Y))` stays in `[0, 1]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::panel::WindowView;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Pearson,
    MutualInformation,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Pearson => "pearson",
            Measure::MutualInformation => "mi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `√(2(1 − ρ))`
    CorrDistance,
    /// `1 − I`
    MiDistance,
}

/// Pearson correlation of two equally long, non-constant series.
pub fn pearson<S: Scalar>(x: &[S], y: &[S]) -> Result<S> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            what: "pearson correlation",
            needed: 2,
            got: x.len(),
        });
    }
    let n = S::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<S>() / n;
    let my = y.iter().copied().sum::<S>() / n;
    let (mut sxy, mut sxx, mut syy) = (S::zero(), S::zero(), S::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy = sxy + da * db;
        sxx = sxx + da * da;
        syy = syy + db * db;
    }
    if sxx == S::zero() || syy == S::zero() {
        return Err(Error::Degenerate("zero-variance series".into()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-S::one()).min(S::one()))
}

/// Histogram bin count `⌈√(T/4)⌉`, evaluated in integers.
pub fn bin_count(t: usize) -> Result<usize> {
    if t < 4 {
        return Err(Error::InsufficientData {
            what: "bin count",
            needed: 4,
            got: t,
        });
    }
    // smallest b with 4·b² ≥ T
    let mut b = ((t as f64 / 4.0).sqrt().floor() as usize).max(1);
    while 4 * b * b < t {
        b += 1;
    }
    while b > 1 && 4 * (b - 1) * (b - 1) >= t {
        b -= 1;
    }
    Ok(b)
}

/// Equal-width bin index of every sample. Values equal to the maximum land
/// in the top bin; a constant series maps entirely to bin 0.
pub fn bin_indices<S: Scalar>(x: &[S], bins: usize) -> Vec<usize> {
    let (lo, hi) = x
        .iter()
        .fold((S::infinity(), S::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if !(range > S::zero()) || bins <= 1 {
        return vec![0; x.len()];
    }
    let b = S::from_usize_lossy(bins);
    x.iter()
        .map(|&v| {
            let k = ((v - lo) * b / range).floor().to_usize().unwrap_or(0);
            k.min(bins - 1)
        })
        .collect()
}

/// Shannon entropy (nats) of a histogram. Non-zero counts are summed in
/// ascending order so equal multisets of counts give bit-identical results.
pub(crate) fn entropy_from_counts<S: Scalar>(counts: &[usize], total: usize) -> S {
    let mut nz: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    nz.sort_unstable();
    let n = S::from_usize_lossy(total);
    nz.into_iter()
        .map(|c| {
            let p = S::from_usize_lossy(c) / n;
            -(p * p.ln())
        })
        .fold(S::zero(), |acc, v| acc + v)
}

fn marginal_counts(idx: &[usize], bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins.max(1)];
    for &k in idx {
        counts[k] += 1;
    }
    counts
}

/// Entropy of the equal-width histogram of `x` with `bins` bins.
pub fn entropy<S: Scalar>(x: &[S], bins: usize) -> Result<S> {
    if bins == 0 {
        return Err(Error::Validation("bin count must be positive".into()));
    }
    if x.is_empty() {
        return Err(Error::InsufficientData {
            what: "entropy",
            needed: 1,
            got: 0,
        });
    }
    let idx = bin_indices(x, bins);
    Ok(entropy_from_counts(&marginal_counts(&idx, bins), x.len()))
}

/// Normalized mutual information with a flag for zero-entropy inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate<S> {
    pub value: S,
    /// Set when either marginal entropy is zero; `value` is then 0.
    pub degenerate: bool,
}

/// Binned series ready for repeated pairwise MI evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Binned<S> {
    idx: Vec<usize>,
    entropy: S,
}

impl<S: Scalar> Binned<S> {
    pub(crate) fn new(x: &[S], bins: usize) -> Self {
        let idx = bin_indices(x, bins);
        let entropy = entropy_from_counts(&marginal_counts(&idx, bins), x.len());
        Self { idx, entropy }
    }
}

pub(crate) fn normalized_mi_binned<S: Scalar>(
    x: &Binned<S>,
    y: &Binned<S>,
    bins: usize,
) -> MiEstimate<S> {
    if x.entropy == S::zero() || y.entropy == S::zero() {
        return MiEstimate {
            value: S::zero(),
            degenerate: true,
        };
    }
    let mut joint = vec![0usize; bins * bins];
    for (&a, &b) in x.idx.iter().zip(&y.idx) {
        joint[a * bins + b] += 1;
    }
    let hxy: S = entropy_from_counts(&joint, x.idx.len());
    let mi = x.entropy + y.entropy - hxy;
    let value = mi / (x.entropy * y.entropy).sqrt();
    MiEstimate {
        value: value.max(S::zero()).min(S::one()),
        degenerate: false,
    }
}

/// `(H(X) + H(Y) − H(X,Y)) / √(H(X)H(Y))`, clamped to `[0, 1]`.
pub fn normalized_mi<S: Scalar>(x: &[S], y: &[S], bins: usize) -> Result<MiEstimate<S>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            what: "mutual information",
            needed: 2,
            got: x.len(),
        });
    }
    if bins == 0 {
        return Err(Error::Validation("bin count must be positive".into()));
    }
    Ok(normalized_mi_binned(
        &Binned::new(x, bins),
        &Binned::new(y, bins),
        bins,
    ))
}

/// Symmetric matrix of pairwise dependencies for one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyMatrix<S> {
    pub measure: Measure,
    pub labels: Vec<String>,
    pub values: Matrix<S>,
    pub window: usize,
    /// Histogram bins used (mutual information only).
    pub bins: Option<usize>,
    /// Pairs `(i, j)`, `i < j`, whose MI was degenerate and set to 0.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

impl<S: Scalar> DependencyMatrix<S> {
    pub fn n(&self) -> usize {
        self.values.rows()
    }
}

/// Pairwise dependencies over arbitrary equally long series.
pub fn dependency_from_series<S: Scalar>(
    labels: &[String],
    series: &[&[S]],
    window: usize,
    measure: Measure,
    bins: Option<usize>,
) -> Result<DependencyMatrix<S>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            what: "dependency matrix series",
            needed: 2,
            got: n,
        });
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    let t = series[0].len();
    if let Some(s) = series.iter().find(|s| s.len() != t) {
        return Err(Error::DimensionMismatch {
            expected: t,
            got: s.len(),
        });
    }
    let mut values = Matrix::identity(n);
    let mut degenerate_pairs = Vec::new();
    let used_bins = match measure {
        Measure::Pearson => {
            if t < 2 {
                return Err(Error::InsufficientData {
                    what: "pearson correlation",
                    needed: 2,
                    got: t,
                });
            }
            for i in 0..n {
                if series[i].iter().all(|&v| v == series[i][0]) {
                    return Err(Error::Degenerate(format!(
                        "series {} is constant in window {window}",
                        labels[i]
                    )));
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let r = pearson(series[i], series[j]).map_err(|e| match e {
                        Error::Degenerate(_) => Error::Degenerate(format!(
                            "pair {}/{} has zero variance in window {window}",
                            labels[i], labels[j]
                        )),
                        other => other,
                    })?;
                    values[(i, j)] = r;
                    values[(j, i)] = r;
                }
            }
            None
        }
        Measure::MutualInformation => {
            let b = match bins {
                Some(0) => return Err(Error::Validation("bin count must be positive".into())),
                Some(b) => b,
                None => bin_count(t)?,
            };
            let binned: Vec<Binned<S>> = series.iter().map(|s| Binned::new(s, b)).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    let est = normalized_mi_binned(&binned[i], &binned[j], b);
                    if est.degenerate {
                        degenerate_pairs.push((i, j));
                    }
                    values[(i, j)] = est.value;
                    values[(j, i)] = est.value;
                }
            }
            Some(b)
        }
    };
    Ok(DependencyMatrix {
        measure,
        labels: labels.to_vec(),
        values,
        window,
        bins: used_bins,
        degenerate_pairs,
    })
}

/// Pairwise dependency matrix of a window; the diagonal is 1.
pub fn dependency_matrix<S: Scalar>(
    window: &WindowView<'_, S>,
    measure: Measure,
    bins: Option<usize>,
) -> Result<DependencyMatrix<S>> {
    let series: Vec<&[S]> = (0..window.n_series()).map(|i| window.series(i)).collect();
    dependency_from_series(window.tickers(), &series, window.index, measure, bins)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix<S> {
    pub metric: Metric,
    pub labels: Vec<String>,
    pub values: Matrix<S>,
    pub window: usize,
}

impl<S: Scalar> DistanceMatrix<S> {
    pub fn n(&self) -> usize {
        self.values.rows()
    }

    /// Builds a distance matrix from raw values (used by tests and callers
    /// bringing their own distances).
    pub fn from_values(metric: Metric, labels: Vec<String>, values: Matrix<S>) -> Result<Self> {
        if !values.is_square() || values.rows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: values.rows(),
            });
        }
        Ok(Self {
            metric,
            labels,
            values,
            window: 0,
        })
    }

    /// Dependency strength implied by a distance: `I = 1 − d` or
    /// `ρ = 1 − d²/2`.
    pub fn similarity(&self, d: S) -> S {
        match self.metric {
            Metric::MiDistance => S::one() - d,
            Metric::CorrDistance => S::one() - d * d / S::lit(2.0),
        }
    }
}

pub fn mi_distance<S: Scalar>(i: S) -> S {
    (S::one() - i).max(S::zero()).min(S::one())
}

pub fn corr_distance<S: Scalar>(rho: S) -> S {
    (S::lit(2.0) * (S::one() - rho)).max(S::zero()).sqrt()
}

pub fn to_distance<S: Scalar>(dep: &DependencyMatrix<S>) -> DistanceMatrix<S> {
    let (metric, f): (Metric, fn(S) -> S) = match dep.measure {
        Measure::Pearson => (Metric::CorrDistance, corr_distance),
        Measure::MutualInformation => (Metric::MiDistance, mi_distance),
    };
    let n = dep.n();
    let values = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            S::zero()
        } else {
            f(dep.values[(i, j)])
        }
    });
    DistanceMatrix {
        metric,
        labels: dep.labels.clone(),
        values,
        window: dep.window,
    }
}

/// Per-window moments of the off-diagonal distance coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MomentSeries<S> {
    pub windows: Vec<usize>,
    pub mean: Vec<S>,
    pub variance: Vec<S>,
    pub skewness: Vec<S>,
    pub kurtosis: Vec<S>,
}

/// Population moments of a sample: mean, variance, skewness `m₃/m₂^{3/2}`
/// and (non-excess) kurtosis `m₄/m₂²`. Skewness and kurtosis are reported as
/// 0 when the variance vanishes.
pub fn sample_moments<S: Scalar>(values: &[S]) -> [S; 4] {
    if values.is_empty() {
        return [S::nan(); 4];
    }
    let n = S::from_usize_lossy(values.len());
    let mean = values.iter().copied().sum::<S>() / n;
    let (mut m2, mut m3, mut m4) = (S::zero(), S::zero(), S::zero());
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 = m2 + d2;
        m3 = m3 + d2 * d;
        m4 = m4 + d2 * d2;
    }
    m2 = m2 / n;
    m3 = m3 / n;
    m4 = m4 / n;
    if m2 == S::zero() {
        return [mean, S::zero(), S::zero(), S::zero()];
    }
    [mean, m2, m3 / m2.powf(S::lit(1.5)), m4 / (m2 * m2)]
}

pub fn moment_series<S: Scalar>(distances: &[DistanceMatrix<S>]) -> MomentSeries<S> {
    let mut out = MomentSeries {
        windows: Vec::with_capacity(distances.len()),
        mean: Vec::with_capacity(distances.len()),
        variance: Vec::with_capacity(distances.len()),
        skewness: Vec::with_capacity(distances.len()),
        kurtosis: Vec::with_capacity(distances.len()),
    };
    for d in distances {
        let [m, v, s, k] = sample_moments(&d.values.upper_triangle());
        out.windows.push(d.window);
        out.mean.push(m);
        out.variance.push(v);
        out.skewness.push(s);
        out.kurtosis.push(k);
    }
    out
}
