//! Scalar Kalman filter for smoothing raw displacement data before
//! decomposition.
//!
//! The state model is a constant-position random walk: the paper-facing
//! configuration is only the two noise variances (process Q, measurement R),
//! so the minimal model consistent with "smooth the noise" is used. The
//! filter is causal; no backward smoothing pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Noise variances and optional initial state for the scalar filter.
///
/// Defaults when unset: `x0` is the first observation and `p0 = r`, which
/// avoids a startup transient without extra configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KalmanConfig {
    /// Process noise variance Q.
    pub q: f64,
    /// Measurement noise variance R.
    pub r: f64,
    /// Initial state estimate; defaults to the first observation.
    pub x0: Option<f64>,
    /// Initial estimate covariance; defaults to R.
    pub p0: Option<f64>,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self {
            q: 1.0,
            r: 16.0,
            x0: None,
            p0: None,
        }
    }
}

impl KalmanConfig {
    fn validate(&self) -> Result<()> {
        if !(self.q > 0.0) || !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kalman noise variances must be positive (q={}, r={})",
                self.q, self.r
            )));
        }
        if let Some(p0) = self.p0 {
            if !(p0 > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "kalman p0 must be positive, got {p0}"
                )));
            }
        }
        Ok(())
    }
}

/// Runs the filter over a series, returning a smoothed series with the same
/// length and timestamps.
///
/// The first sample initializes the state (output = x0); from the second
/// sample on, each step is predict `x- = x`, `P- = P + Q` followed by
/// update `K = P-/(P- + R)`, `x = x- + K(z - x-)`, `P = (1 - K)P-`.
pub fn kalman_smooth(series: &TimeSeries, cfg: &KalmanConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let values = series.values();
    let mut x = cfg.x0.unwrap_or(values[0]);
    let mut p = cfg.p0.unwrap_or(cfg.r);

    let mut out = Vec::with_capacity(values.len());
    out.push(x);
    for &z in &values[1..] {
        let p_pred = p + cfg.q;
        let k = p_pred / (p_pred + cfg.r);
        x += k * (z - x);
        p = (1.0 - k) * p_pred;
        out.push(x);
    }
    series.with_values(out)
}

/// Gain/covariance trace of a filter run; used by diagnostics and tests.
pub fn kalman_trace(series: &TimeSeries, cfg: &KalmanConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let values = series.values();
    let mut x = cfg.x0.unwrap_or(values[0]);
    let mut p = cfg.p0.unwrap_or(cfg.r);
    let mut gains = Vec::with_capacity(values.len().saturating_sub(1));
    let mut covs = Vec::with_capacity(values.len().saturating_sub(1));
    for &z in &values[1..] {
        let p_pred = p + cfg.q;
        let k = p_pred / (p_pred + cfg.r);
        x += k * (z - x);
        p = (1.0 - k) * p_pred;
        gains.push(k);
        covs.push(p);
    }
    Ok((gains, covs))
}
