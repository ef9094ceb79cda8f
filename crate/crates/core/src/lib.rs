//! Linear and nonlinear dependence in multivariate return panels.
//!
//! Pearson correlation and histogram mutual information per rolling window,
//! Fourier-transform surrogate ensembles to separate the nonlinear part,
//! spanning-tree and threshold networks over the resulting distances, and a
//! mean-variance backtest whose cash exposure follows the nonlinearity score.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` case.

pub mod dependence;
pub mod error;
pub mod matrix;
pub mod network;
pub mod nonlinearity;
pub mod panel;
pub mod portfolio;
pub mod scalar;
pub mod surrogate;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Scalar;

pub type PriceTable64 = panel::PriceTable<f64>;
pub type ReturnPanel64 = panel::ReturnPanel<f64>;
pub type DependencyMatrix64 = dependence::DependencyMatrix<f64>;
pub type DistanceMatrix64 = dependence::DistanceMatrix<f64>;
pub type SurrogateEnsemble64 = surrogate::SurrogateEnsemble<f64>;
pub type SignificanceMatrix64 = nonlinearity::SignificanceMatrix<f64>;
pub type NonlinearityMatrix64 = nonlinearity::NonlinearityMatrix<f64>;
pub type Tree64 = network::Tree<f64>;
pub type Graph64 = network::Graph<f64>;
pub type AssetStats64 = portfolio::AssetStats<f64>;
pub type BacktestResult64 = portfolio::BacktestResult<f64>;

pub type ReturnPanel32 = panel::ReturnPanel<f32>;
pub type DependencyMatrix32 = dependence::DependencyMatrix<f32>;
pub type DistanceMatrix32 = dependence::DistanceMatrix<f32>;
