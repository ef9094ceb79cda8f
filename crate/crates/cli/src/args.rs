//! Command-line surface. Every long flag can also be given as `key = value`
//! in a `--config` file; flags on the command line win.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "nlcorr",
    version,
    about = "Linear and nonlinear dependency analytics for return panels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dependency matrices, distance moments and network metrics per window.
    Analyze(AnalyzeArgs),
    /// Surrogate significance and nonlinearity scores per window.
    Nonlinearity(NonlinearityArgs),
    /// Fixed, fully invested and NLC-scaled strategies side by side.
    Backtest(BacktestArgs),
    /// Seeded synthetic price table.
    Synth(SynthArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Nonlinearity(_) => "nonlinearity",
            Command::Backtest(_) => "backtest",
            Command::Synth(_) => "synth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureChoice {
    Pearson,
    Mi,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    Shared,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyChoice {
    Fixed,
    Full,
    Nlc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpeChoice {
    /// Mean over variance
    #[value(name = "paper")]
    #[serde(rename = "paper")]
    OverVariance,
    /// Mean over standard deviation
    Conventional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum S2Choice {
    Printed,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeChoice {
    LinearGaussian,
    NonlinearCoupled,
    RegimeSwitch,
}

/// Input and output locations shared by the file-driven commands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Io {
    /// Wide price CSV: `date,TICKER1,TICKER2,…`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// File of `key = value` lines using the long flag names.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    #[arg(long, default_value_t = 1000)]
    pub window: usize,
    #[arg(long, default_value_t = 20)]
    pub step: usize,
    /// Histogram bins for MI; default `⌈√(T/4)⌉`.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = MeasureChoice::Both)]
    pub measure: MeasureChoice,
    /// Fraction of closest pairs kept in the threshold network.
    #[arg(long, default_value_t = 0.2)]
    pub threshold_q: f64,
    /// Also write full dependency and distance matrices.
    #[arg(long)]
    pub matrices: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct NonlinearityArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    #[arg(long, default_value_t = 1000)]
    pub window: usize,
    #[arg(long, default_value_t = 20)]
    pub step: usize,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub surrogates: usize,
    #[arg(long, value_enum, default_value_t = ModeChoice::Shared)]
    pub surrogate_mode: ModeChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct BacktestArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Estimation window.
    #[arg(long, default_value_t = 500)]
    pub window: usize,
    /// Steps between rebalances.
    #[arg(long, default_value_t = 20)]
    pub step: usize,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub surrogates: usize,
    #[arg(long, value_enum, default_value_t = ModeChoice::Shared)]
    pub surrogate_mode: ModeChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Strategy whose allocations go to the weights file.
    #[arg(long, value_enum, default_value_t = StrategyChoice::Nlc)]
    pub strategy: StrategyChoice,
    #[arg(long, value_enum, default_value_t = SharpeChoice::OverVariance)]
    pub sharpe: SharpeChoice,
    /// Normalization of the trailing s1 sum.
    #[arg(long, value_enum, default_value_t = S2Choice::Printed)]
    pub s2: S2Choice,
    /// Target-return sweep size.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Comma-separated fixed-allocation weights; equal weights if absent.
    #[arg(long, value_delimiter = ',')]
    pub fixed_weights: Option<Vec<f64>>,
    /// CSV `date,rate` of per-step simple cash rates.
    #[arg(long)]
    pub cash_rate: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub n_series: usize,
    /// Number of returns; the price table has one more row.
    #[arg(long, default_value_t = 2000)]
    pub length: usize,
    #[arg(long, value_enum, default_value_t = RegimeChoice::LinearGaussian)]
    pub regime: RegimeChoice,
    /// Uniform pairwise correlation of the Gaussian draws.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.9)]
    pub coupling: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub drift: f64,
    #[arg(long, default_value_t = 0.01)]
    pub volatility: f64,
    #[arg(long, default_value_t = 100.0)]
    pub start_price: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn config_path(argv: &[OsString]) -> CliResult<Option<PathBuf>> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let Some(s) = a.to_str() else { continue };
        if s == "--config" {
            return match it.next() {
                Some(p) => Ok(Some(PathBuf::from(p))),
                None => Err(CliError::Usage("--config needs a file".into())),
            };
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

/// `key = value` pairs; blank lines and `#` comments are skipped.
pub fn read_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key = value",
                path.display(),
                no + 1
            )));
        };
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Splices config-file entries in front of the command-line flags.
fn expand_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let Some(pos) = argv.iter().skip(1).position(|a| {
        a.to_str()
            .is_some_and(|s| matches!(s, "analyze" | "nonlinearity" | "backtest" | "synth"))
    }) else {
        return Ok(argv);
    };
    let pos = pos + 1;
    let root = Cli::command();
    let sub = root
        .find_subcommand(argv[pos].to_str().expect("checked above"))
        .expect("known subcommand");

    let mut injected = Vec::new();
    for (key, value) in read_config(&path)? {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| CliError::Usage(format!("unknown config key {key:?}")))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "config key {key:?} expects true or false, got {other:?}"
                    )))
                }
            }
        } else {
            injected.push(OsString::from(format!("--{key}={value}")));
        }
    }
    let mut out = argv[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

/// Parses arguments, merging a `--config` file when given. Help and version
/// requests come back as a clap error with the matching kind.
pub fn parse<I, T>(args: I) -> std::result::Result<Cli, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = expand_config(argv).map_err(ParseFailure::Config)?;
    Cli::try_parse_from(argv).map_err(ParseFailure::Clap)
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Config(CliError),
}
