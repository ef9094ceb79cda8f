use nlcorr::panel::{gen_synthetic, synthetic_dates, Correlation, Regime, SyntheticSpec};
use nlcorr::{Error, ReturnPanel64};

use crate::args::{RegimeChoice, SynthArgs};
use crate::error::CliResult;
use crate::output::{num, write_run, Table};

pub const PRICES_FILE: &str = "prices.csv";

/// Writes `prices.csv` whose log returns are the synthetic panel.
pub fn synth(args: &SynthArgs) -> CliResult<()> {
    if !(args.start_price > 0.0 && args.start_price.is_finite()) {
        return Err(Error::Validation(format!(
            "start price must be positive, got {}",
            args.start_price
        ))
        .into());
    }
    let regime = match args.regime {
        RegimeChoice::LinearGaussian => Regime::LinearGaussian,
        RegimeChoice::NonlinearCoupled => Regime::NonlinearCoupled,
        RegimeChoice::RegimeSwitch => Regime::RegimeSwitch,
    };
    let spec = SyntheticSpec::new(args.n_series, args.length, regime)
        .with_correlation(Correlation::Uniform(args.rho))
        .with_coupling(args.coupling)
        .with_scale(args.drift, args.volatility);
    let panel: ReturnPanel64 = gen_synthetic(&spec, args.seed)?;

    let mut header = vec!["date"];
    header.extend(panel.tickers().iter().map(String::as_str));
    let mut table = Table::new(PRICES_FILE, &header);
    let dates = synthetic_dates(panel.len() + 1);
    let mut cumulative = vec![0.0f64; panel.n_series()];
    for (t, d) in dates.iter().enumerate() {
        if t > 0 {
            for (c, row) in cumulative.iter_mut().zip(panel.rows()) {
                *c += row[t - 1];
            }
        }
        let cells: Vec<String> = std::iter::once(d.clone())
            .chain(cumulative.iter().map(|c| num(args.start_price * c.exp())))
            .collect();
        table.row(&cells);
    }
    write_run(
        &args.out_dir,
        "synth",
        Some(args.seed),
        Vec::new(),
        args,
        vec![table],
    )?;
    Ok(())
}
