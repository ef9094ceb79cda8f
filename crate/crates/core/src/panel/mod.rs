//! Price tables, log-return panels and rolling windows.

mod prices;
pub mod synthetic;

pub use prices::{load_price_table, read_price_table, PriceTable};
pub use synthetic::{gen_synthetic, synthetic_dates, Correlation, Regime, SyntheticSpec};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Aligned log returns: `returns[i][t]` for series `i` at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel<S> {
    tickers: Vec<String>,
    dates: Vec<String>,
    returns: Vec<Vec<S>>,
}

impl<S: Scalar> ReturnPanel<S> {
    /// Validates shape and finiteness.
    pub fn new(tickers: Vec<String>, dates: Vec<String>, returns: Vec<Vec<S>>) -> Result<Self> {
        if tickers.len() != returns.len() {
            return Err(Error::DimensionMismatch {
                expected: tickers.len(),
                got: returns.len(),
            });
        }
        for (ticker, row) in tickers.iter().zip(&returns) {
            if row.len() != dates.len() {
                return Err(Error::Validation(format!(
                    "series {ticker} has {} returns but the panel has {} dates",
                    row.len(),
                    dates.len()
                )));
            }
            if let Some(t) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::Validation(format!(
                    "series {ticker} has a non-finite return at {}",
                    dates[t]
                )));
            }
        }
        Ok(Self {
            tickers,
            dates,
            returns,
        })
    }

    /// Panel with generated labels (`S00`, `S01`, … and `t0`, `t1`, …).
    pub fn from_series(returns: Vec<Vec<S>>) -> Result<Self> {
        let len = returns.first().map_or(0, Vec::len);
        let tickers = (0..returns.len()).map(|i| format!("S{i:02}")).collect();
        let dates = (0..len).map(|t| format!("t{t}")).collect();
        Self::new(tickers, dates, returns)
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn series(&self, i: usize) -> &[S] {
        &self.returns[i]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.returns
    }

    pub fn n_series(&self) -> usize {
        self.returns.len()
    }

    /// Number of time steps `L`.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// View over columns `start..end`.
    pub fn view(&self, index: usize, start: usize, end: usize) -> Result<WindowView<'_, S>> {
        if start >= end || end > self.len() {
            return Err(Error::Validation(format!(
                "window {start}..{end} outside panel of length {}",
                self.len()
            )));
        }
        Ok(WindowView {
            index,
            start,
            end,
            panel: self,
        })
    }

    /// Same labels, new return rows (e.g. a surrogate realization).
    pub fn with_returns(&self, returns: Vec<Vec<S>>) -> Result<Self> {
        Self::new(self.tickers.clone(), self.dates.clone(), returns)
    }
}

/// Rolling-window length `T` and stride `δT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    length: usize,
    step: usize,
}

impl WindowSpec {
    pub fn new(length: usize, step: usize) -> Result<Self> {
        if length < 2 {
            return Err(Error::Validation(format!(
                "window length must be at least 2, got {length}"
            )));
        }
        if step < 1 {
            return Err(Error::Validation("window step must be at least 1".into()));
        }
        Ok(Self { length, step })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Number of windows that fit in a panel of `len` steps.
    pub fn count(&self, len: usize) -> usize {
        if len < self.length {
            0
        } else {
            (len - self.length) / self.step + 1
        }
    }
}

/// Borrowed `N × T` slice of a panel.
#[derive(Debug, Clone, Copy)]
pub struct WindowView<'a, S> {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    panel: &'a ReturnPanel<S>,
}

impl<'a, S: Scalar> WindowView<'a, S> {
    pub fn series(&self, i: usize) -> &'a [S] {
        &self.panel.returns[i][self.start..self.end]
    }

    pub fn n_series(&self) -> usize {
        self.panel.n_series()
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn tickers(&self) -> &'a [String] {
        &self.panel.tickers
    }

    pub fn end_date(&self) -> &'a str {
        &self.panel.dates[self.end - 1]
    }

    /// Owned copy of the window as a stand-alone panel.
    pub fn to_panel(&self) -> ReturnPanel<S> {
        ReturnPanel {
            tickers: self.panel.tickers.clone(),
            dates: self.panel.dates[self.start..self.end].to_vec(),
            returns: (0..self.n_series())
                .map(|i| self.series(i).to_vec())
                .collect(),
        }
    }
}

/// `x[i][t] = ln p[i][t+1] − ln p[i][t]`.
pub fn to_log_returns<S: Scalar>(table: &PriceTable<S>) -> Result<ReturnPanel<S>> {
    let m = table.dates().len();
    if m < 2 {
        return Err(Error::InsufficientData {
            what: "log returns",
            needed: 2,
            got: m,
        });
    }
    let returns = table
        .prices()
        .iter()
        .map(|row| row.windows(2).map(|w| w[1].ln() - w[0].ln()).collect())
        .collect();
    ReturnPanel::new(
        table.tickers().to_vec(),
        table.dates()[1..].to_vec(),
        returns,
    )
}

/// Overlapping windows starting at `w·δT`; `floor((L − T)/δT) + 1` of them.
pub fn rolling_windows<S: Scalar>(
    panel: &ReturnPanel<S>,
    spec: WindowSpec,
) -> Result<Vec<WindowView<'_, S>>> {
    if panel.len() < spec.length {
        return Err(Error::InsufficientData {
            what: "rolling window",
            needed: spec.length,
            got: panel.len(),
        });
    }
    (0..spec.count(panel.len()))
        .map(|w| {
            let start = w * spec.step;
            panel.view(w, start, start + spec.length)
        })
        .collect()
}
