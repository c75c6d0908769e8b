//! Decomposition-based time-series forecasting toolkit.
//!
//! The pipeline smooths a displacement series with a scalar Kalman filter,
//! decomposes it by variational mode decomposition (VMD, hyperparameters
//! tuned by a genetic algorithm) into trend / periodic / residual
//! sub-series, statistically validates each sub-series, fits a dedicated
//! model per sub-series (piecewise-logistic trend, gradient-boosted trees,
//! clustered LSTMs), and recomposes the component forecasts into a single
//! prediction with RMSE/MAPE evaluation.

pub mod clusterlstm;
pub mod error;
pub mod fft;
pub mod ga;
pub mod gbt;
pub mod kalman;
pub mod lstm;
pub mod pipeline;
pub mod series;
pub mod stats;
pub mod synth;
pub mod trend;
pub mod vmd;

pub use error::{Error, Result};
pub use series::{load_csv, mape, rmse, save_csv, MetricsReport, SplitSeries, TimeSeries};
