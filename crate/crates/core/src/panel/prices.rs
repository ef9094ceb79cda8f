use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Aligned closing prices, one row per ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable<S> {
    tickers: Vec<String>,
    dates: Vec<String>,
    prices: Vec<Vec<S>>,
}

impl<S: Scalar> PriceTable<S> {
    pub fn new(tickers: Vec<String>, dates: Vec<String>, prices: Vec<Vec<S>>) -> Result<Self> {
        if tickers.len() != prices.len() {
            return Err(Error::DimensionMismatch {
                expected: tickers.len(),
                got: prices.len(),
            });
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Validation(format!(
                "dates must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        for (ticker, row) in tickers.iter().zip(&prices) {
            if row.len() != dates.len() {
                return Err(Error::DimensionMismatch {
                    expected: dates.len(),
                    got: row.len(),
                });
            }
            if let Some(t) = row.iter().position(|&p| !(p > S::zero()) || !p.is_finite()) {
                return Err(Error::Validation(format!(
                    "non-positive price {} for {ticker} on {}",
                    row[t], dates[t]
                )));
            }
        }
        Ok(Self {
            tickers,
            dates,
            prices,
        })
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn prices(&self) -> &[Vec<S>] {
        &self.prices
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(
        cell.to_ascii_lowercase().as_str(),
        "" | "na" | "n/a" | "nan" | "null" | "none"
    )
}

/// Loads a wide CSV (`date,TICKER1,TICKER2,…`).
pub fn load_price_table<S: Scalar + FromStr>(path: impl AsRef<Path>) -> Result<PriceTable<S>> {
    read_price_table(File::open(path)?)
}

/// Parses a wide price CSV. Dates with any missing cell are dropped, the
/// remaining rows are sorted by date.
pub fn read_price_table<S: Scalar + FromStr>(reader: impl Read) -> Result<PriceTable<S>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Parse {
            row: 1,
            column: header.len().max(1),
            message: "expected a date column followed by at least one ticker".into(),
        });
    }
    let tickers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = tickers.len();

    let mut rows: Vec<(String, Vec<S>)> = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let row_no = k + 2;
        let record = record?;
        if record.len() != n + 1 {
            return Err(Error::Parse {
                row: row_no,
                column: record.len().min(n + 1),
                message: format!("expected {} cells, found {}", n + 1, record.len()),
            });
        }
        let date = record[0].to_string();
        if date.is_empty() {
            return Err(Error::Parse {
                row: row_no,
                column: 1,
                message: "empty date".into(),
            });
        }
        let mut values = Vec::with_capacity(n);
        let mut complete = true;
        for (c, cell) in record.iter().enumerate().skip(1) {
            if is_missing(cell) {
                complete = false;
                continue;
            }
            let v: S = cell.parse().map_err(|_| Error::Parse {
                row: row_no,
                column: c + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            if !(v > S::zero()) || !v.is_finite() {
                return Err(Error::Validation(format!(
                    "non-positive price {cell} for {} on {date}",
                    tickers[c - 1]
                )));
            }
            values.push(v);
        }
        if complete {
            rows.push((date, values));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Validation(format!("duplicate date {}", w[0].0)));
    }

    let dates = rows.iter().map(|(d, _)| d.clone()).collect();
    let prices = (0..n)
        .map(|i| rows.iter().map(|(_, v)| v[i]).collect())
        .collect();
    PriceTable::new(tickers, dates, prices)
}
