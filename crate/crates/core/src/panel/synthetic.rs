//! Seeded synthetic return panels for tests and demos.
//!
//! * `LinearGaussian`: draws from `N(0, C)` for the requested correlation `C`.
//! * `NonlinearCoupled`: same base draws, then every odd series `2m+1` is
//!   replaced by `c·(z₂ₘ² − 1)/√2 + √(1 − c²)·z₂ₘ₊₁`, a quadratic coupling to
//!   its even partner with unit variance and (near) zero linear correlation.
//! * `RegimeSwitch`: the first `⌊L/2⌋` steps are linear, the rest nonlinear.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ReturnPanel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    LinearGaussian,
    NonlinearCoupled,
    RegimeSwitch,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear-gaussian" | "linear" => Ok(Self::LinearGaussian),
            "nonlinear-coupled" | "nonlinear" => Ok(Self::NonlinearCoupled),
            "regime-switch" => Ok(Self::RegimeSwitch),
            other => Err(Error::Validation(format!("unknown regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Correlation {
    Identity,
    /// Every off-diagonal entry equal to the given value.
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_series: usize,
    pub length: usize,
    pub regime: Regime,
    pub correlation: Correlation,
    /// Quadratic coupling strength `c ∈ [0, 1]`.
    pub coupling: f64,
    /// Per-step mean added to every series.
    pub drift: f64,
    /// Per-step scale applied to the unit-variance draws.
    pub volatility: f64,
}

impl SyntheticSpec {
    pub fn new(n_series: usize, length: usize, regime: Regime) -> Self {
        Self {
            n_series,
            length,
            regime,
            correlation: Correlation::Identity,
            coupling: 0.9,
            drift: 0.0,
            volatility: 1.0,
        }
    }

    pub fn with_correlation(mut self, correlation: Correlation) -> Self {
        self.correlation = correlation;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_scale(mut self, drift: f64, volatility: f64) -> Self {
        self.drift = drift;
        self.volatility = volatility;
        self
    }

    fn correlation_matrix(&self) -> Result<Matrix<f64>> {
        let n = self.n_series;
        let m = match &self.correlation {
            Correlation::Identity => Matrix::identity(n),
            Correlation::Uniform(rho) => {
                Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { *rho })
            }
            Correlation::Matrix(rows) => Matrix::from_rows(rows).ok_or_else(|| {
                Error::Validation("correlation matrix rows have unequal length".into())
            })?,
        };
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.rows(),
            });
        }
        if !m.is_symmetric() || (0..n).any(|i| m[(i, i)] != 1.0) {
            return Err(Error::Validation(
                "correlation matrix must be symmetric with unit diagonal".into(),
            ));
        }
        Ok(m)
    }
}

/// Weekday labels (`YYYY-MM-DD`) starting 2000-01-03.
pub fn synthetic_dates(count: usize) -> Vec<String> {
    let mut day = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day.format("%Y-%m-%d").to_string());
        }
        day += Duration::days(1);
    }
    out
}

/// Pure function of `(spec, seed)`.
pub fn gen_synthetic<S: Scalar>(spec: &SyntheticSpec, seed: u64) -> Result<ReturnPanel<S>> {
    if spec.n_series < 2 {
        return Err(Error::InsufficientData {
            what: "synthetic panel series",
            needed: 2,
            got: spec.n_series,
        });
    }
    if spec.length < 2 {
        return Err(Error::InsufficientData {
            what: "synthetic panel length",
            needed: 2,
            got: spec.length,
        });
    }
    if !(0.0..=1.0).contains(&spec.coupling) {
        return Err(Error::Validation(format!(
            "coupling must lie in [0, 1], got {}",
            spec.coupling
        )));
    }
    if !(spec.volatility > 0.0) || !spec.drift.is_finite() || !spec.volatility.is_finite() {
        return Err(Error::Validation(
            "volatility must be positive and drift finite".into(),
        ));
    }
    let chol = spec
        .correlation_matrix()?
        .cholesky()
        .ok_or_else(|| Error::Validation("correlation matrix is not positive definite".into()))?;

    let n = spec.n_series;
    let nonlinear_from = match spec.regime {
        Regime::LinearGaussian => spec.length,
        Regime::NonlinearCoupled => 0,
        Regime::RegimeSwitch => spec.length / 2,
    };
    let c = spec.coupling;
    let residual = (1.0 - c * c).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut returns = vec![Vec::with_capacity(spec.length); n];
    let mut iid = vec![0.0f64; n];
    for t in 0..spec.length {
        for v in iid.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let mut z: Vec<f64> = (0..n)
            .map(|i| (0..=i).map(|k| chol[(i, k)] * iid[k]).sum())
            .collect();
        if t >= nonlinear_from {
            for pair in 0..n / 2 {
                let (a, b) = (2 * pair, 2 * pair + 1);
                z[b] = c * (z[a] * z[a] - 1.0) / std::f64::consts::SQRT_2 + residual * z[b];
            }
        }
        for (row, v) in returns.iter_mut().zip(&z) {
            row.push(S::lit(spec.drift + spec.volatility * v));
        }
    }

    let tickers = (0..n).map(|i| format!("S{i:02}")).collect();
    let dates = synthetic_dates(spec.length + 1).split_off(1);
    ReturnPanel::new(tickers, dates, returns)
}
