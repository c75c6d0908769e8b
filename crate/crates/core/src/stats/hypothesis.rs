//! Nonparametric and regression-based hypothesis tests: Mann-Kendall trend,
//! autocorrelation, Ljung-Box white noise, and Granger causality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::ols::{ols_sse, Design};
use crate::stats::special::{chi2_cdf, f_cdf, normal_cdf};

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub reject_at_05: bool,
    pub null_hypothesis: String,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64, null_hypothesis: impl Into<String>) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            statistic,
            p_value,
            reject_at_05: p_value < 0.05,
            null_hypothesis: null_hypothesis.into(),
        }
    }
}

/// Mann-Kendall monotone trend test.
///
/// `S` counts concordant minus discordant pairs; the variance uses the
/// standard tie correction and `Z` applies the continuity correction
/// (`S -> S - sign(S)`).
pub fn mann_kendall(values: &[f64]) -> Result<TestResult> {
    let n = values.len();
    if n < 8 {
        return Err(Error::SeriesTooShort { needed: 8, got: n });
    }

    let mut s: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = values[j] - values[i];
            s += if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                0
            };
        }
    }

    // Tie groups: exact equality, counted on a sorted copy.
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut var = nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0;
    let mut run = 1usize;
    for i in 1..=n {
        if i < n && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            if run > 1 {
                let t = run as f64;
                var -= t * (t - 1.0) * (2.0 * t + 5.0) / 18.0;
            }
            run = 1;
        }
    }

    let z = if s == 0 || var <= 0.0 {
        0.0
    } else if s > 0 {
        (s as f64 - 1.0) / var.sqrt()
    } else {
        (s as f64 + 1.0) / var.sqrt()
    };
    let p = 2.0 * (1.0 - normal_cdf(z.abs()));
    Ok(TestResult::new(z, p, "series has no monotone trend"))
}

/// Sample autocorrelation function, `rho_0..rho_max_lag`.
pub fn acf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if max_lag >= n {
        return Err(Error::InvalidParameter(format!(
            "max_lag {max_lag} must be smaller than series length {n}"
        )));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let denom: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    if denom == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let num: f64 = (0..n - k)
            .map(|t| (values[t] - mean) * (values[t + k] - mean))
            .sum();
        out.push(num / denom);
    }
    Ok(out)
}

/// Ljung-Box portmanteau test that the first `lag` autocorrelations are
/// jointly zero: `Q = n(n+2) * sum_k rho_k^2 / (n-k)`, chi-squared with
/// `lag` degrees of freedom under the null.
pub fn ljung_box(values: &[f64], lag: usize) -> Result<TestResult> {
    if lag < 1 {
        return Err(Error::InvalidParameter("ljung-box lag must be >= 1".into()));
    }
    let n = values.len();
    if n <= lag + 1 {
        return Err(Error::SeriesTooShort {
            needed: lag + 2,
            got: n,
        });
    }
    let rho = acf(values, lag)?;
    let nf = n as f64;
    let q: f64 = (1..=lag)
        .map(|k| rho[k] * rho[k] / (nf - k as f64))
        .sum::<f64>()
        * nf
        * (nf + 2.0);
    let p = 1.0 - chi2_cdf(q, lag as f64)?;
    Ok(TestResult::new(q, p, "series is white noise"))
}

/// Granger causality F-test.
///
/// Restricted model regresses `target_t` on its own lags `1..=lag`; the
/// unrestricted model adds the candidate cause's lags. A singular design is
/// reported, never silently regularized.
pub fn granger_test(target: &[f64], cause: &[f64], lag: usize) -> Result<TestResult> {
    if target.len() != cause.len() {
        return Err(Error::LengthMismatch {
            left: target.len(),
            right: cause.len(),
        });
    }
    if lag < 1 {
        return Err(Error::InvalidParameter("granger lag must be >= 1".into()));
    }
    let n = target.len();
    if n <= 2 * lag + 1 {
        return Err(Error::SeriesTooShort {
            needed: 2 * lag + 2,
            got: n,
        });
    }

    let rows = n - lag;
    let y: Vec<f64> = target[lag..].to_vec();

    let mut restricted = Design::new(rows, 1 + lag);
    let mut unrestricted = Design::new(rows, 1 + 2 * lag);
    for r in 0..rows {
        let t = r + lag;
        restricted.set(r, 0, 1.0);
        unrestricted.set(r, 0, 1.0);
        for k in 1..=lag {
            restricted.set(r, k, target[t - k]);
            unrestricted.set(r, k, target[t - k]);
            unrestricted.set(r, lag + k, cause[t - k]);
        }
    }

    let sse_r = ols_sse(&restricted, &y)?;
    let sse_u = ols_sse(&unrestricted, &y)?;

    let df2 = rows as f64 - 2.0 * lag as f64 - 1.0;
    if df2 < 1.0 {
        return Err(Error::SeriesTooShort {
            needed: 3 * lag + 2,
            got: n,
        });
    }
    // The nested model can never fit better; clamp away rounding noise.
    let num = ((sse_r - sse_u).max(0.0)) / lag as f64;
    let f = if sse_u <= 0.0 {
        if num > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        num / (sse_u / df2)
    };
    let p = if f.is_finite() {
        1.0 - f_cdf(f, lag as f64, df2)?
    } else {
        0.0
    };
    Ok(TestResult::new(
        f,
        p,
        "cause's lags add no predictive power for target",
    ))
}
