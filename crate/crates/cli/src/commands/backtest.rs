use std::path::Path;

use nlcorr::portfolio::{run_backtest, BacktestConfig, S2Variant, SharpeRatio, Strategy};
use nlcorr::Error;

use super::{load_returns, surrogate_mode};
use crate::args::{BacktestArgs, S2Choice, SharpeChoice, StrategyChoice};
use crate::error::{CliError, CliResult};
use crate::output::{digest_input, num, opt_num, read_input, write_run, InputDigest, Table};

/// Per-step rates aligned to `dates`: each date takes the latest rate dated
/// on or before it. Dates before `first_needed` may precede the file and get 0.
pub fn load_cash_rates(
    path: &Path,
    dates: &[String],
    first_needed: usize,
) -> CliResult<(Vec<f64>, InputDigest)> {
    let bytes = read_input(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let mut rates: Vec<(String, f64)> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(Error::from)?;
        let row = k + 2;
        if rec.len() != 2 {
            return Err(Error::Parse {
                row,
                column: rec.len().min(2),
                message: "expected date,rate".into(),
            }
            .into());
        }
        let rate: f64 = rec[1].parse().map_err(|_| Error::Parse {
            row,
            column: 2,
            message: format!("not a number: {:?}", &rec[1]),
        })?;
        if !rate.is_finite() || rate <= -1.0 {
            return Err(Error::Validation(format!(
                "cash rate {rate} on {} must be finite and above -1",
                &rec[0]
            ))
            .into());
        }
        rates.push((rec[0].to_string(), rate));
    }
    rates.sort_by(|a, b| a.0.cmp(&b.0));

    let mut out = Vec::with_capacity(dates.len());
    let mut next = 0;
    let mut current: Option<f64> = None;
    for (t, d) in dates.iter().enumerate() {
        while next < rates.len() && rates[next].0.as_str() <= d.as_str() {
            current = Some(rates[next].1);
            next += 1;
        }
        match current {
            Some(r) => out.push(r),
            None if t < first_needed => out.push(0.0),
            None => return Err(Error::Validation(format!("no cash rate on or before {d}")).into()),
        }
    }
    Ok((out, digest_input(path, &bytes)))
}

fn strategy(s: StrategyChoice) -> Strategy {
    match s {
        StrategyChoice::Fixed => Strategy::Fixed,
        StrategyChoice::Full => Strategy::Full,
        StrategyChoice::Nlc => Strategy::Nlc,
    }
}

pub fn backtest(args: &BacktestArgs) -> CliResult<()> {
    let chosen = strategy(args.strategy);
    if chosen == Strategy::Nlc && args.cash_rate.is_none() {
        return Err(CliError::Usage(
            "--strategy nlc needs --cash-rate <file>".into(),
        ));
    }
    let (panel, input) = load_returns(&args.io.input)?;
    let mut inputs = vec![input];
    let cash = match &args.cash_rate {
        Some(path) => {
            let (rates, digest) = load_cash_rates(path, panel.dates(), args.window)?;
            inputs.push(digest);
            rates
        }
        None => vec![0.0; panel.len()],
    };
    let config = BacktestConfig {
        window: args.window,
        rebalance: args.step,
        surrogates: args.surrogates,
        surrogate_mode: surrogate_mode(args.surrogate_mode),
        seed: args.seed,
        bins: args.bins,
        grid: args.grid,
        sharpe: match args.sharpe {
            SharpeChoice::OverVariance => SharpeRatio::OverVariance,
            SharpeChoice::Conventional => SharpeRatio::Conventional,
        },
        s2_variant: match args.s2 {
            S2Choice::Printed => S2Variant::Printed,
            S2Choice::Strict => S2Variant::Strict,
        },
        fixed_weights: args.fixed_weights.clone(),
    };
    let result = run_backtest(&panel, &cash, &config)?;

    let mut values = Table::new(
        "values.csv",
        &["date", "value_fixed", "value_full", "value_nlc"],
    );
    for (k, d) in result.dates.iter().enumerate() {
        values.row([
            d.as_str(),
            &num(result.value_fixed[k]),
            &num(result.value_full[k]),
            &num(result.value_nlc[k]),
        ]);
    }
    let mut weights = Table::new("weights.csv", &["date", "ticker", "weight", "cash_weight"]);
    let mut scores = Table::new(
        "scores.csv",
        &["date", "s1", "s2", "s3", "s*_1", "s*_2", "s*_3", "s_nlc"],
    );
    for (k, rec) in result.records.iter().enumerate() {
        let (w, c) = result.allocation(chosen, k);
        let c = num(c);
        for (t, v) in result.labels.iter().zip(w) {
            weights.row([rec.date.as_str(), t, &num(*v), &c]);
        }
        let m = &rec.measures;
        let s = &rec.score;
        scores.row([
            rec.date.as_str(),
            &num(m.s1),
            &opt_num(m.s2),
            &opt_num(m.s3),
            &s.s1_star.to_string(),
            &s.s2_star.to_string(),
            &s.s3_star.to_string(),
            &num(s.s_nlc),
        ]);
    }

    write_run(
        &args.io.out_dir,
        "backtest",
        Some(args.seed),
        inputs,
        args,
        vec![values, weights, scores],
    )?;
    Ok(())
}
