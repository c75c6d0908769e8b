//! Variational mode decomposition of a series into band-limited intrinsic
//! mode functions.
//!
//! The solver is the standard frequency-domain ADMM scheme: the signal is
//! even-extended by mirroring, transformed once, and the modes are updated
//! in the positive-frequency half by Wiener-style filters centred at each
//! mode's running centre frequency, with a dual variable enforcing
//! reconstruction. Modes are updated Gauss-Seidel style within an
//! iteration:
//!
//! ```text
//! u_k <- (f - sum_{i != k} u_i + lambda/2) / (1 + 2*alpha*(w - w_k)^2)
//! w_k <- sum_w w*|u_k(w)|^2 / sum_w |u_k(w)|^2
//! lambda <- lambda + tau*(f - sum_k u_k)
//! ```
//!
//! For the three-mode configuration the lowest-frequency mode is the trend
//! (T), the next the periodic term (S), and the rest the residual (R).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{dft, idft};
use crate::series::TimeSeries;

/// Solver parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VmdParams {
    /// Number of modes K.
    pub k_modes: usize,
    /// Bandwidth penalty; larger values give narrower modes.
    pub alpha: f64,
    /// Dual-ascent step. Zero disables the reconstruction constraint,
    /// which is the robust choice for noisy data.
    pub tau: f64,
    /// Convergence tolerance on the summed relative mode change.
    pub tol: f64,
    pub max_iter: usize,
    /// Pin the first mode at zero frequency so it captures the trend.
    pub dc_mode: bool,
}

impl Default for VmdParams {
    fn default() -> Self {
        Self {
            k_modes: 3,
            alpha: 2000.0,
            tau: 0.0,
            tol: 1e-7,
            max_iter: 500,
            dc_mode: true,
        }
    }
}

impl VmdParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_modes < 1 {
            return Err(Error::InvalidParameter("k_modes must be >= 1".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be non-negative, got {}",
                self.tau
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Raw multi-mode result, ordered by ascending centre frequency.
#[derive(Debug, Clone)]
pub struct VmdModes {
    pub modes: Vec<Vec<f64>>,
    /// Centre frequency per mode, cycles per sample.
    pub center_freqs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Frequency-domain reconstruction MSE per iteration (Parseval proxy
    /// on the mirrored signal); used by convergence diagnostics.
    pub recon_trace: Vec<f64>,
}

/// The (T, S, R) sub-series triple plus reconstruction error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub trend: TimeSeries,
    pub periodic: TimeSeries,
    pub residual: TimeSeries,
    /// Ascending centre frequencies, cycles per sample.
    pub center_freqs: Vec<f64>,
    /// `mean((T + S + R - input)^2)`.
    pub recon_mse: f64,
    pub iterations: usize,
    /// False when the solver hit `max_iter` before the tolerance.
    pub converged: bool,
}

impl Decomposition {
    /// Elementwise T + S + R.
    pub fn component_sum(&self) -> Vec<f64> {
        self.trend
            .values()
            .iter()
            .zip(self.periodic.values())
            .zip(self.residual.values())
            .map(|((t, s), r)| t + s + r)
            .collect()
    }
}

/// Decomposes raw values into `k_modes` band-limited modes.
pub fn vmd_modes(signal: &[f64], params: &VmdParams) -> Result<VmdModes> {
    params.validate()?;
    let n = signal.len();
    if n < 16 {
        return Err(Error::SeriesTooShort { needed: 16, got: n });
    }
    let k_modes = params.k_modes;

    // Even extension by mirroring: half the signal reflected on each side.
    let mid = n / 2;
    let big_t = 2 * n;
    let mut mirrored = Vec::with_capacity(big_t);
    mirrored.extend(signal[..mid].iter().rev());
    mirrored.extend_from_slice(signal);
    mirrored.extend(signal[mid..].iter().rev());

    let f_hat = dft(&mirrored
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect::<Vec<_>>());

    // One-sided spectrum: bins 0..T/2, frequency i/T in [0, 0.5).
    let half = big_t / 2;
    let f_plus: Vec<Complex64> = f_hat[..half].to_vec();
    let freqs: Vec<f64> = (0..half).map(|i| i as f64 / big_t as f64).collect();

    let mut u = vec![vec![Complex64::new(0.0, 0.0); half]; k_modes];
    let mut lambda = vec![Complex64::new(0.0, 0.0); half];
    let mut omega: Vec<f64> = (0..k_modes).map(|k| 0.5 * k as f64 / k_modes as f64).collect();
    if params.dc_mode {
        omega[0] = 0.0;
    }
    let mut sum_all = vec![Complex64::new(0.0, 0.0); half];

    let mut iterations = 0;
    let mut converged = false;
    let mut recon_trace = Vec::new();

    for iter in 0..params.max_iter {
        let u_prev = u.clone();

        for k in 0..k_modes {
            let wk = omega[k];
            let alpha2 = 2.0 * params.alpha;
            for i in 0..half {
                let num = f_plus[i] - (sum_all[i] - u[k][i]) + lambda[i] * 0.5;
                let dw = freqs[i] - wk;
                let den = 1.0 + alpha2 * dw * dw;
                let new = num / den;
                sum_all[i] += new - u[k][i];
                u[k][i] = new;
            }
            if !(params.dc_mode && k == 0) {
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..half {
                    let e = u[k][i].norm_sqr();
                    num += freqs[i] * e;
                    den += e;
                }
                if den > 0.0 {
                    omega[k] = num / den;
                }
            }
        }

        if params.tau != 0.0 {
            for i in 0..half {
                lambda[i] += params.tau * (f_plus[i] - sum_all[i]);
            }
        }

        let mut diff = 0.0;
        for k in 0..k_modes {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..half {
                num += (u[k][i] - u_prev[k][i]).norm_sqr();
                den += u_prev[k][i].norm_sqr();
            }
            diff += num / (den + f64::EPSILON);
        }

        let recon_err: f64 = (0..half)
            .map(|i| (f_plus[i] - sum_all[i]).norm_sqr())
            .sum::<f64>()
            / half as f64;
        recon_trace.push(recon_err);

        iterations = iter + 1;
        if !diff.is_finite() || omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite { iteration: iterations });
        }
        if iter > 0 && diff < params.tol {
            converged = true;
            break;
        }
    }

    // Order modes by centre frequency (stable on ties).
    let mut order: Vec<usize> = (0..k_modes).collect();
    order.sort_by(|&a, &b| omega[a].partial_cmp(&omega[b]).unwrap().then(a.cmp(&b)));

    let mut modes = Vec::with_capacity(k_modes);
    let mut center_freqs = Vec::with_capacity(k_modes);
    for &k in &order {
        // Hermitian mirror back to a full spectrum, inverse transform,
        // drop the mirrored padding.
        let mut full = vec![Complex64::new(0.0, 0.0); big_t];
        full[..half].copy_from_slice(&u[k]);
        for i in 1..half {
            full[big_t - i] = u[k][i].conj();
        }
        let time = idft(&full);
        let mode: Vec<f64> = time[mid..mid + n].iter().map(|c| c.re).collect();
        modes.push(mode);
        center_freqs.push(omega[k]);
    }

    Ok(VmdModes {
        modes,
        center_freqs,
        iterations,
        converged,
        recon_trace,
    })
}

/// Decomposes a series into the (T, S, R) triple. The lowest-frequency mode
/// is the trend, the second the periodic term, and all remaining modes sum
/// into the residual; missing modes (k < 3) become zero series.
pub fn vmd_decompose(series: &TimeSeries, params: &VmdParams) -> Result<Decomposition> {
    let raw = vmd_modes(series.values(), params)?;
    let n = series.len();
    let zero = || vec![0.0; n];

    let trend = raw.modes.first().cloned().unwrap_or_else(zero);
    let periodic = raw.modes.get(1).cloned().unwrap_or_else(zero);
    let residual = if raw.modes.len() > 2 {
        let mut acc = zero();
        for mode in &raw.modes[2..] {
            for (a, m) in acc.iter_mut().zip(mode) {
                *a += m;
            }
        }
        acc
    } else {
        zero()
    };

    let recon_mse = series
        .values()
        .iter()
        .zip(trend.iter().zip(periodic.iter().zip(residual.iter())))
        .map(|(y, (t, (s, r)))| {
            let e = t + s + r - y;
            e * e
        })
        .sum::<f64>()
        / n as f64;

    Ok(Decomposition {
        trend: series.with_values(trend)?,
        periodic: series.with_values(periodic)?,
        residual: series.with_values(residual)?,
        center_freqs: raw.center_freqs,
        recon_mse,
        iterations: raw.iterations,
        converged: raw.converged,
    })
}

/// Recomposes a decomposition into a single series (elementwise T + S + R).
pub fn reconstruct(d: &Decomposition) -> TimeSeries {
    d.trend
        .with_values(d.component_sum())
        .expect("component lengths match by construction")
}
