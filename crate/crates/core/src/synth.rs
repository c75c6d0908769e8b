//! Seeded synthetic displacement-like series with known ground-truth
//! components, standing in for sensor data in tests and demos.
//!
//! `y_t = cubic(u) + A*sin(2*pi*t/period + phase) + AR(1) + measurement
//! noise`, with `u = t/(n-1)` the normalized time. The default cubic is an
//! S-shaped rise (derivative zero at both ends), the sort of saturating
//! growth curve the trend model is built for.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Residual-regime switching: the AR(1) innovation scale alternates
/// between the base sigma and `high_sigma` every `block_len` samples,
/// optionally with its own autoregressive coefficient in the loud regime.
/// With `smooth` set, the switching follows a sinusoidal envelope of
/// period `2 * block_len` instead of hard jumps.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub high_sigma: f64,
    pub block_len: usize,
    /// AR coefficient inside high-sigma blocks; base `ar_phi` when unset.
    pub high_phi: Option<f64>,
    pub smooth: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SynthSpec {
    pub length: usize,
    pub seed: u64,
    /// Coefficients of 1, u, u^2, u^3 over normalized time u.
    pub cubic: [f64; 4],
    pub amplitude: f64,
    /// Period in samples.
    pub period: f64,
    pub phase: f64,
    pub ar_phi: f64,
    pub ar_sigma: f64,
    pub noise_sigma: f64,
    pub regime: Option<RegimeSpec>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            length: 2426,
            seed: 42,
            cubic: [5.0, 0.0, 30.0, -20.0],
            amplitude: 1.0,
            period: 24.0,
            phase: std::f64::consts::PI / 24.0,
            ar_phi: 0.8,
            ar_sigma: 0.15,
            noise_sigma: 0.05,
            regime: None,
        }
    }
}

/// Generated series plus its true components for oracle checks.
#[derive(Debug, Clone)]
pub struct SynthData {
    pub series: TimeSeries,
    pub trend: Vec<f64>,
    pub periodic: Vec<f64>,
    pub residual: Vec<f64>,
    pub noise: Vec<f64>,
}

pub fn generate_synthetic(spec: &SynthSpec) -> Result<SynthData> {
    if spec.length < 200 {
        return Err(Error::SeriesTooShort {
            needed: 200,
            got: spec.length,
        });
    }
    if !(spec.period > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "period must exceed one sample, got {}",
            spec.period
        )));
    }
    if spec.ar_phi.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "ar_phi must be inside (-1,1) for a stationary residual, got {}",
            spec.ar_phi
        )));
    }
    let n = spec.length;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut trend = Vec::with_capacity(n);
    let mut periodic = Vec::with_capacity(n);
    let mut residual = Vec::with_capacity(n);
    let mut noise = Vec::with_capacity(n);
    let mut ar_prev = 0.0;
    for t in 0..n {
        let u = t as f64 / (n - 1) as f64;
        let [c0, c1, c2, c3] = spec.cubic;
        trend.push(c0 + c1 * u + c2 * u * u + c3 * u * u * u);
        periodic.push(
            spec.amplitude * (2.0 * std::f64::consts::PI * t as f64 / spec.period + spec.phase).sin(),
        );
        let (sigma, phi) = match spec.regime {
            Some(r) => {
                let blend = if r.smooth {
                    let period = 2.0 * r.block_len.max(1) as f64;
                    0.5 * (1.0 - (2.0 * std::f64::consts::PI * t as f64 / period).cos())
                } else if (t / r.block_len.max(1)) % 2 == 1 {
                    1.0
                } else {
                    0.0
                };
                let hi_phi = r.high_phi.unwrap_or(spec.ar_phi);
                (
                    spec.ar_sigma + (r.high_sigma - spec.ar_sigma) * blend,
                    spec.ar_phi + (hi_phi - spec.ar_phi) * blend,
                )
            }
            None => (spec.ar_sigma, spec.ar_phi),
        };
        let e: f64 = StandardNormal.sample(&mut rng);
        ar_prev = phi * ar_prev + sigma * e;
        residual.push(ar_prev);
        let m: f64 = StandardNormal.sample(&mut rng);
        noise.push(spec.noise_sigma * m);
    }

    let values: Vec<f64> = (0..n)
        .map(|t| trend[t] + periodic[t] + residual[t] + noise[t])
        .collect();
    Ok(SynthData {
        series: TimeSeries::from_values(values)?,
        trend,
        periodic,
        residual,
        noise,
    })
}
