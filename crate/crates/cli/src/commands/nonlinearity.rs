use rayon::prelude::*;

use nlcorr::nonlinearity::{
    analyze_nonlinearity, chi_profile, off_diagonal_mean, window_seed, SignificanceProfile,
    WindowNonlinearity,
};
use nlcorr::panel::rolling_windows;
use nlcorr::Error;

use super::{load_returns, surrogate_mode, window_spec};
use crate::args::NonlinearityArgs;
use crate::error::{CliError, CliResult};
use crate::output::{num, write_run, Table};

pub fn nonlinearity(args: &NonlinearityArgs) -> CliResult<()> {
    if args.surrogates < 2 {
        return Err(Error::Validation(format!(
            "the surrogate spread needs at least 2 realizations, got {}",
            args.surrogates
        ))
        .into());
    }
    let (panel, input) = load_returns(&args.io.input)?;
    let spec = window_spec(args.window, args.step)?;
    let views = rolling_windows(&panel, spec)?;
    let mode = surrogate_mode(args.surrogate_mode);

    type Out = (
        usize,
        String,
        WindowNonlinearity<f64>,
        SignificanceProfile<f64>,
    );
    let results: Vec<Out> = views
        .par_iter()
        .map(|view| -> CliResult<Out> {
            let wrap = CliError::in_window(view.index, view.end_date());
            let run = || -> nlcorr::Result<_> {
                let nl = analyze_nonlinearity(
                    &view.to_panel(),
                    view.index,
                    args.surrogates,
                    mode,
                    window_seed(args.seed, view.index),
                    args.bins,
                )?;
                let profile = chi_profile(&nl.chi)?;
                Ok((nl, profile))
            };
            let (nl, profile) = run().map_err(wrap)?;
            Ok((view.index, view.end_date().to_string(), nl, profile))
        })
        .collect::<CliResult<_>>()?;

    let tickers = panel.tickers();
    let mut pairs = Table::new(
        "chi_pairs.csv",
        &[
            "window",
            "date",
            "source",
            "target",
            "mi",
            "surrogate_mean",
            "surrogate_std",
            "chi_sig",
            "zeta_nlc",
        ],
    );
    let mut profile = Table::new("chi_profile.csv", &["window", "date", "ticker", "chi_mean"]);
    let mut series = Table::new(
        "nonlinearity_series.csv",
        &[
            "window",
            "date",
            "chi_global",
            "zeta_mean",
            "degenerate_chi",
            "degenerate_zeta",
        ],
    );
    for (index, date, nl, prof) in &results {
        let w = index.to_string();
        let d = date.as_str();
        let n = tickers.len();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.row([
                    &w,
                    d,
                    &tickers[i],
                    &tickers[j],
                    &num(nl.mi.values[(i, j)]),
                    &num(nl.surrogate.mean[(i, j)]),
                    &num(nl.surrogate.std[(i, j)]),
                    &num(nl.chi.values[(i, j)]),
                    &num(nl.zeta.values[(i, j)]),
                ]);
            }
        }
        for (t, v) in tickers.iter().zip(&prof.per_asset) {
            profile.row([&w, d, t, &num(*v)]);
        }
        series.row([
            &w,
            d,
            &num(prof.global),
            &num(off_diagonal_mean(&nl.zeta.values)),
            &nl.chi.degenerate_pairs.len().to_string(),
            &nl.zeta.degenerate_pairs.len().to_string(),
        ]);
    }

    write_run(
        &args.io.out_dir,
        "nonlinearity",
        Some(args.seed),
        vec![input],
        args,
        vec![pairs, profile, series],
    )?;
    Ok(())
}
