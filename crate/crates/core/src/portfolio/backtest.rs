//! Rolling rebalance backtest of three strategies side by side: a fixed
//! allocation, the fully invested max-Sharpe portfolio, and the same risky
//! sleeve with a cash weight driven by the nonlinearity score.
//!
//! Accounting between rebalances: risky holdings drift with their own log
//! returns, and the cash share of the account stays at its rebalance value,
//! earning (or paying, when negative) the per-step simple cash rate.

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::qp::{max_sharpe_portfolio, SharpeRatio};
use super::score::{
    cash_weight, nlc_measures, s1_from_zeta, score_map, NlcMeasures, NlcScore, S2Variant,
};
use super::stats::AssetStats;
use crate::dependence::bin_count;
use crate::error::{Error, Result};
use crate::nonlinearity::{analyze_nonlinearity, window_seed};
use crate::panel::ReturnPanel;
use crate::scalar::Scalar;
use crate::surrogate::SurrogateMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Fixed,
    Full,
    Nlc,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Fixed => "fixed",
            Strategy::Full => "full",
            Strategy::Nlc => "nlc",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Self::Fixed),
            "full" => Ok(Self::Full),
            "nlc" => Ok(Self::Nlc),
            other => Err(Error::Validation(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestConfig {
    /// Estimation window for statistics and `ζ`.
    pub window: usize,
    /// Steps between rebalances.
    pub rebalance: usize,
    pub surrogates: usize,
    pub surrogate_mode: SurrogateMode,
    pub seed: u64,
    /// MI bins; `None` uses the window's default.
    pub bins: Option<usize>,
    /// Target-return sweep size.
    pub grid: usize,
    pub sharpe: SharpeRatio,
    pub s2_variant: S2Variant,
    /// Fixed-allocation weights; `None` means equal weights.
    pub fixed_weights: Option<Vec<f64>>,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            window: 500,
            rebalance: 20,
            surrogates: 20,
            surrogate_mode: SurrogateMode::SharedPhase,
            seed: 0,
            bins: None,
            grid: 101,
            sharpe: SharpeRatio::OverVariance,
            s2_variant: S2Variant::Printed,
            fixed_weights: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RebalanceRecord<S> {
    /// First step held under this allocation.
    pub step: usize,
    /// Last date of the estimation window.
    pub date: String,
    /// Max-Sharpe risky weights (shared by the full and NLC strategies).
    pub weights: Vec<S>,
    /// True when the optimizer failed and the previous weights were kept.
    pub carried: bool,
    pub expected_return: S,
    pub variance: S,
    pub measures: NlcMeasures<S>,
    pub score: NlcScore<S>,
    /// NLC strategy cash weight.
    pub cash_weight: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestResult<S> {
    pub config: BacktestConfig,
    pub labels: Vec<String>,
    /// Value-path dates, starting at the last date of the first window.
    pub dates: Vec<String>,
    pub value_fixed: Vec<S>,
    pub value_full: Vec<S>,
    pub value_nlc: Vec<S>,
    pub fixed_weights: Vec<S>,
    pub records: Vec<RebalanceRecord<S>>,
}

impl<S: Scalar> BacktestResult<S> {
    pub fn values(&self, strategy: Strategy) -> &[S] {
        match strategy {
            Strategy::Fixed => &self.value_fixed,
            Strategy::Full => &self.value_full,
            Strategy::Nlc => &self.value_nlc,
        }
    }

    /// Risky weights and cash weight a strategy held after rebalance `k`.
    pub fn allocation(&self, strategy: Strategy, k: usize) -> (&[S], S) {
        let rec = &self.records[k];
        match strategy {
            Strategy::Fixed => (&self.fixed_weights, S::zero()),
            Strategy::Full => (&rec.weights, S::zero()),
            Strategy::Nlc => (&rec.weights, rec.cash_weight),
        }
    }
}

/// One strategy's account: drifting risky holdings plus a fixed cash share.
struct Account<S> {
    value: S,
    holdings: Vec<S>,
    cash_share: S,
}

impl<S: Scalar> Account<S> {
    fn new(n: usize) -> Self {
        Self {
            value: S::one(),
            holdings: vec![S::zero(); n],
            cash_share: S::zero(),
        }
    }

    fn rebalance(&mut self, weights: &[S], cash_share: S) {
        self.holdings.copy_from_slice(weights);
        self.cash_share = cash_share;
    }

    fn step(&mut self, log_returns: &[S], rate: S) -> S {
        let before: S = self.holdings.iter().copied().sum();
        for (h, &x) in self.holdings.iter_mut().zip(log_returns) {
            *h = *h * x.exp();
        }
        let after: S = self.holdings.iter().copied().sum();
        let growth = if before > S::zero() {
            after / before
        } else {
            S::one()
        };
        let c = self.cash_share;
        self.value = self.value * ((S::one() - c) * growth + c * (S::one() + rate));
        self.value
    }
}

fn check_fixed<S: Scalar>(config: &BacktestConfig, n: usize) -> Result<Vec<S>> {
    match &config.fixed_weights {
        None => Ok(vec![S::one() / S::from_usize_lossy(n); n]),
        Some(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
            let sum: f64 = w.iter().sum();
            if w.iter().any(|&v| !(v >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(
                    "fixed weights must be non-negative and sum to 1".into(),
                ));
            }
            Ok(w.iter().map(|&v| S::lit(v)).collect())
        }
    }
}

struct WindowInputs<S> {
    portfolio: Option<(Vec<S>, S, S)>,
    s1: S,
}

/// Runs all three strategies over `panel` with per-step simple cash rates
/// aligned to the panel's dates.
pub fn run_backtest<S: Scalar>(
    panel: &ReturnPanel<S>,
    cash_rate: &[S],
    config: &BacktestConfig,
) -> Result<BacktestResult<S>> {
    let (n, len, w) = (panel.n_series(), panel.len(), config.window);
    if config.rebalance < 1 {
        return Err(Error::Validation(
            "rebalance interval must be positive".into(),
        ));
    }
    if w < 4 {
        return Err(Error::InsufficientData {
            what: "backtest window",
            needed: 4,
            got: w,
        });
    }
    if len <= w {
        return Err(Error::InsufficientData {
            what: "backtest steps",
            needed: w + 1,
            got: len,
        });
    }
    if cash_rate.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: cash_rate.len(),
        });
    }
    if config.surrogates < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 surrogates, got {}",
            config.surrogates
        )));
    }
    let fixed = check_fixed::<S>(config, n)?;
    let bins = match config.bins {
        Some(b) => b,
        None => bin_count(w)?,
    };

    let starts: Vec<usize> = (w..len).step_by(config.rebalance).collect();
    let inputs: Vec<WindowInputs<S>> = starts
        .par_iter()
        .enumerate()
        .map(|(k, &t)| -> Result<WindowInputs<S>> {
            let view = panel.view(k, t - w, t)?;
            let stats = AssetStats::from_window(&view)?;
            let portfolio = match max_sharpe_portfolio(&stats, config.grid, config.sharpe) {
                Ok(p) => Some((p.weights, p.expected_return, p.variance)),
                Err(Error::Numeric(msg)) => {
                    warn!(
                        "rebalance at {}: optimizer failed ({msg}); keeping previous weights",
                        view.end_date()
                    );
                    None
                }
                Err(e) => return Err(e),
            };
            // a single asset has no pairs and hence no nonlinearity signal
            let s1 = if n >= 2 {
                let nl = analyze_nonlinearity(
                    &view.to_panel(),
                    k,
                    config.surrogates,
                    config.surrogate_mode,
                    window_seed(config.seed, k),
                    Some(bins),
                )?;
                s1_from_zeta(&nl.zeta)
            } else {
                S::zero()
            };
            Ok(WindowInputs { portfolio, s1 })
        })
        .collect::<Result<_>>()?;
    let s1_history: Vec<S> = inputs.iter().map(|i| i.s1).collect();

    let mut accounts = [Account::new(n), Account::new(n), Account::new(n)];
    let mut values = [vec![S::one()], vec![S::one()], vec![S::one()]];
    let mut dates = vec![panel.dates()[w - 1].clone()];
    let mut records = Vec::with_capacity(starts.len());
    let mut previous = (
        vec![S::one() / S::from_usize_lossy(n); n],
        S::zero(),
        S::zero(),
    );
    let mut x = vec![S::zero(); n];

    for (k, (&t, input)) in starts.iter().zip(&inputs).enumerate() {
        let carried = input.portfolio.is_none();
        if let Some(p) = &input.portfolio {
            previous = p.clone();
        }
        let measures = nlc_measures(&s1_history, k, config.s2_variant)?;
        let score = score_map(&measures);
        let cash = cash_weight(score.s_nlc);
        accounts[0].rebalance(&fixed, S::zero());
        accounts[1].rebalance(&previous.0, S::zero());
        accounts[2].rebalance(&previous.0, cash);
        records.push(RebalanceRecord {
            step: t,
            date: panel.dates()[t - 1].clone(),
            weights: previous.0.clone(),
            carried,
            expected_return: previous.1,
            variance: previous.2,
            measures,
            score,
            cash_weight: cash,
        });

        let end = (t + config.rebalance).min(len);
        for step in t..end {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = panel.series(i)[step];
            }
            for (acc, path) in accounts.iter_mut().zip(values.iter_mut()) {
                let v = acc.step(&x, cash_rate[step]);
                if !(v > S::zero()) || !v.is_finite() {
                    return Err(Error::Numeric(format!(
                        "portfolio value {v} at {} is not positive",
                        panel.dates()[step]
                    )));
                }
                path.push(v);
            }
            dates.push(panel.dates()[step].clone());
        }
    }

    let [value_fixed, value_full, value_nlc] = values;
    Ok(BacktestResult {
        config: config.clone(),
        labels: panel.tickers().to_vec(),
        dates,
        value_fixed,
        value_full,
        value_nlc,
        fixed_weights: fixed,
        records,
    })
}
