//! Mean-variance allocation, the nonlinearity score and the rebalancing
//! backtest.

mod backtest;
mod qp;
mod score;
mod stats;

pub use backtest::{run_backtest, BacktestConfig, BacktestResult, RebalanceRecord, Strategy};
pub use qp::{
    max_sharpe_portfolio, min_variance_weights, MinVariance, Portfolio, QpOutcome, SharpeRatio,
};
pub use score::{
    cash_weight, nlc_measures, s1_from_zeta, score_map, score_s1, score_s2, score_s3, NlcMeasures,
    NlcScore, S2Variant, S2_SPAN, S3_LAG,
};
pub use stats::{covariance, median_sorted, quantile_sorted, robust_mean_return, AssetStats};
