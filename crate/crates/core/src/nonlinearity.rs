//! Significance (`χ_sig`) and strength (`ζ_nlc`) of nonlinear dependence,
//! from original-versus-surrogate mutual information.

use serde::Serialize;

use crate::dependence::{bin_count, dependency_from_series, DependencyMatrix, Measure};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::panel::ReturnPanel;
use crate::scalar::{mean, Scalar};
use crate::surrogate::{ensemble_mi_stats, make_surrogates, EnsemblePairStats, SurrogateMode};

/// Threshold below which `σ_{I*}` or `I` is treated as zero.
pub const DEGENERACY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceMatrix<S> {
    pub labels: Vec<String>,
    pub values: Matrix<S>,
    pub window: usize,
    /// Pairs with vanishing surrogate spread, reported as 0.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearityMatrix<S> {
    pub labels: Vec<String>,
    pub values: Matrix<S>,
    pub window: usize,
    /// Pairs with vanishing original MI, reported as 0.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceProfile<S> {
    /// Mean of `χ_sig(i, j)` over `j ≠ i`.
    pub per_asset: Vec<S>,
    /// Mean of the per-asset values.
    pub global: S,
}

fn check_inputs<S: Scalar>(orig: &DependencyMatrix<S>, stats: &EnsemblePairStats<S>) -> Result<()> {
    if orig.measure != Measure::MutualInformation {
        return Err(Error::Validation(
            "nonlinearity scores need a mutual-information matrix".into(),
        ));
    }
    for m in [&stats.mean, &stats.std] {
        if m.rows() != orig.n() || !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: orig.n(),
                got: m.rows(),
            });
        }
    }
    Ok(())
}

/// Entrywise transform over the strict upper triangle, mirrored; zero diagonal.
fn pairwise<S: Scalar>(
    n: usize,
    mut f: impl FnMut(usize, usize) -> Option<S>,
) -> (Matrix<S>, Vec<(usize, usize)>) {
    let mut values = Matrix::zeros(n, n);
    let mut degenerate = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = f(i, j).unwrap_or_else(|| {
                degenerate.push((i, j));
                S::zero()
            });
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    (values, degenerate)
}

/// `(I − ⟨I*⟩) / σ_{I*}` per pair.
pub fn chi_sig<S: Scalar>(
    orig: &DependencyMatrix<S>,
    stats: &EnsemblePairStats<S>,
) -> Result<SignificanceMatrix<S>> {
    check_inputs(orig, stats)?;
    let eps = S::lit(DEGENERACY_EPS);
    let (values, degenerate_pairs) = pairwise(orig.n(), |i, j| {
        let sigma = stats.std[(i, j)];
        (sigma >= eps).then(|| (orig.values[(i, j)] - stats.mean[(i, j)]) / sigma)
    });
    Ok(SignificanceMatrix {
        labels: orig.labels.clone(),
        values,
        window: orig.window,
        degenerate_pairs,
    })
}

/// `|I − ⟨I*⟩| / I` per pair.
pub fn zeta_nlc<S: Scalar>(
    orig: &DependencyMatrix<S>,
    stats: &EnsemblePairStats<S>,
) -> Result<NonlinearityMatrix<S>> {
    check_inputs(orig, stats)?;
    let eps = S::lit(DEGENERACY_EPS);
    let (values, degenerate_pairs) = pairwise(orig.n(), |i, j| {
        let i_orig = orig.values[(i, j)];
        (i_orig >= eps).then(|| (i_orig - stats.mean[(i, j)]).abs() / i_orig)
    });
    Ok(NonlinearityMatrix {
        labels: orig.labels.clone(),
        values,
        window: orig.window,
        degenerate_pairs,
    })
}

/// Mean over the off-diagonal entries of a square matrix.
pub fn off_diagonal_mean<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.rows();
    if n < 2 {
        return S::zero();
    }
    let mut sum = S::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum = sum + m[(i, j)];
            }
        }
    }
    sum / S::from_usize_lossy(n * (n - 1))
}

pub fn chi_profile<S: Scalar>(sig: &SignificanceMatrix<S>) -> Result<SignificanceProfile<S>> {
    let n = sig.values.rows();
    if n < 2 {
        return Err(Error::InsufficientData {
            what: "significance profile assets",
            needed: 2,
            got: n,
        });
    }
    let denom = S::from_usize_lossy(n - 1);
    let per_asset: Vec<S> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| sig.values[(i, j)])
                .sum::<S>()
                / denom
        })
        .collect();
    let global = mean(&per_asset).expect("n >= 2");
    Ok(SignificanceProfile { per_asset, global })
}

/// Independent seed for window `index` of a run seeded with `seed`
/// (SplitMix64 finalizer).
pub fn window_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything the nonlinearity analysis produces for one window.
#[derive(Debug, Clone)]
pub struct WindowNonlinearity<S> {
    pub mi: DependencyMatrix<S>,
    pub surrogate: EnsemblePairStats<S>,
    pub chi: SignificanceMatrix<S>,
    pub zeta: NonlinearityMatrix<S>,
}

/// Original MI, a `k`-member surrogate ensemble and both scores for a panel
/// (typically one window). `bins` defaults to `⌈√(T/4)⌉`.
pub fn analyze_nonlinearity<S: Scalar>(
    panel: &ReturnPanel<S>,
    window: usize,
    k: usize,
    mode: SurrogateMode,
    seed: u64,
    bins: Option<usize>,
) -> Result<WindowNonlinearity<S>> {
    let bins = match bins {
        Some(b) => b,
        None => bin_count(panel.len())?,
    };
    let series: Vec<&[S]> = panel.rows().iter().map(Vec::as_slice).collect();
    let mi = dependency_from_series(
        panel.tickers(),
        &series,
        window,
        Measure::MutualInformation,
        Some(bins),
    )?;
    let ensemble = make_surrogates(panel, k, mode, seed)?;
    let surrogate = ensemble_mi_stats(&ensemble, 0..panel.len(), Some(bins))?;
    let chi = chi_sig(&mi, &surrogate)?;
    let zeta = zeta_nlc(&mi, &surrogate)?;
    Ok(WindowNonlinearity {
        mi,
        surrogate,
        chi,
        zeta,
    })
}
