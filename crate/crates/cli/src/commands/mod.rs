mod analyze;
mod backtest;
mod nonlinearity;
mod synth;

pub use analyze::analyze;
pub use backtest::{backtest, load_cash_rates};
pub use nonlinearity::nonlinearity;
pub use synth::synth;

use std::path::Path;

use nlcorr::panel::{read_price_table, to_log_returns, WindowSpec};
use nlcorr::surrogate::SurrogateMode;
use nlcorr::{PriceTable64, ReturnPanel64};

use crate::args::ModeChoice;
use crate::error::CliResult;
use crate::output::{digest_input, read_input, InputDigest};

/// Reads a price CSV and converts it to log returns.
pub(crate) fn load_returns(path: &Path) -> CliResult<(ReturnPanel64, InputDigest)> {
    let bytes = read_input(path)?;
    let table: PriceTable64 = read_price_table(bytes.as_slice())?;
    let panel = to_log_returns(&table)?;
    Ok((panel, digest_input(path, &bytes)))
}

pub(crate) fn window_spec(length: usize, step: usize) -> CliResult<WindowSpec> {
    Ok(WindowSpec::new(length, step)?)
}

pub(crate) fn surrogate_mode(m: ModeChoice) -> SurrogateMode {
    match m {
        ModeChoice::Shared => SurrogateMode::SharedPhase,
        ModeChoice::Independent => SurrogateMode::IndependentPhase,
    }
}
