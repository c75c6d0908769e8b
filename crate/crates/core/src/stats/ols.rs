//! Least squares via Householder QR, polynomial fitting, and studentized
//! residual outlier detection with a Bonferroni threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::special::t_quantile;

/// Dense column-major design matrix.
pub struct Design {
    pub n: usize,
    pub p: usize,
    /// Column-major storage, `data[j * n + i]` is row i of column j.
    pub data: Vec<f64>,
}

impl Design {
    pub fn new(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            data: vec![0.0; n * p],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }
}

/// Least-squares fit with the diagnostics the outlier machinery needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OlsFit {
    /// Coefficients in the (possibly rescaled) design basis.
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sse: f64,
    /// Leverage: diagonal of the hat matrix X(X'X)^-1 X'.
    pub hat_diag: Vec<f64>,
    pub n: usize,
    /// Number of predictors including the intercept.
    pub p: usize,
    /// Affine map applied to x before powers were formed (polynomial fits):
    /// `u = (x - x_offset) * x_scale`.
    pub x_offset: f64,
    pub x_scale: f64,
}

impl OlsFit {
    /// Evaluates a polynomial fit at a raw x value.
    pub fn predict(&self, x: f64) -> f64 {
        let u = (x - self.x_offset) * self.x_scale;
        let mut acc = 0.0;
        let mut pow = 1.0;
        for c in &self.coefficients {
            acc += c * pow;
            pow *= u;
        }
        acc
    }
}

struct QrFactors {
    /// Householder vectors below/on the diagonal, R strictly above it.
    a: Vec<f64>,
    betas: Vec<f64>,
    rdiag: Vec<f64>,
    n: usize,
    p: usize,
}

impl QrFactors {
    fn factor(design: &Design) -> Result<Self> {
        let n = design.n;
        let p = design.p;
        let mut a = design.data.clone();
        let mut betas = vec![0.0; p];
        let mut rdiag = vec![0.0; p];

        let mut max_diag: f64 = 0.0;
        for j in 0..p {
            let cj = j * n;
            let mut norm = 0.0;
            for i in j..n {
                norm += a[cj + i] * a[cj + i];
            }
            let norm = norm.sqrt();
            let alpha = if a[cj + j] >= 0.0 { -norm } else { norm };
            let v0 = a[cj + j] - alpha;
            let mut vtv = v0 * v0;
            for i in (j + 1)..n {
                vtv += a[cj + i] * a[cj + i];
            }
            max_diag = max_diag.max(alpha.abs());
            if norm == 0.0 || vtv == 0.0 || alpha.abs() <= 1e-12 * max_diag.max(1e-300) {
                return Err(Error::SingularDesign);
            }
            let beta = 2.0 / vtv;
            a[cj + j] = v0;
            betas[j] = beta;
            rdiag[j] = alpha;

            for k in (j + 1)..p {
                let ck = k * n;
                let mut dot = 0.0;
                for i in j..n {
                    dot += a[cj + i] * a[ck + i];
                }
                let scale = beta * dot;
                for i in j..n {
                    a[ck + i] -= scale * a[cj + i];
                }
            }
        }
        Ok(Self { a, betas, rdiag, n, p })
    }

    /// Applies Q' to a vector in place (forward reflector order).
    fn apply_qt(&self, v: &mut [f64]) {
        for j in 0..self.p {
            let cj = j * self.n;
            let mut dot = 0.0;
            for i in j..self.n {
                dot += self.a[cj + i] * v[i];
            }
            let scale = self.betas[j] * dot;
            for i in j..self.n {
                v[i] -= scale * self.a[cj + i];
            }
        }
    }

    /// Applies Q to a vector in place (reverse reflector order).
    fn apply_q(&self, v: &mut [f64]) {
        for j in (0..self.p).rev() {
            let cj = j * self.n;
            let mut dot = 0.0;
            for i in j..self.n {
                dot += self.a[cj + i] * v[i];
            }
            let scale = self.betas[j] * dot;
            for i in j..self.n {
                v[i] -= scale * self.a[cj + i];
            }
        }
    }

    /// Back-substitution for R beta = rhs (rhs holds the first p entries of
    /// Q'y).
    fn solve_r(&self, rhs: &[f64]) -> Vec<f64> {
        let mut beta = vec![0.0; self.p];
        for j in (0..self.p).rev() {
            let mut acc = rhs[j];
            for k in (j + 1)..self.p {
                acc -= self.a[k * self.n + j] * beta[k];
            }
            beta[j] = acc / self.rdiag[j];
        }
        beta
    }

    /// Leverage h_ii via the thin-Q columns.
    fn hat_diag(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.n];
        let mut e = vec![0.0; self.n];
        for j in 0..self.p {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            self.apply_q(&mut e);
            for i in 0..self.n {
                h[i] += e[i] * e[i];
            }
        }
        h
    }
}

/// General least squares on an explicit design matrix.
pub fn ols_fit(design: &Design, y: &[f64]) -> Result<OlsFit> {
    if y.len() != design.n {
        return Err(Error::LengthMismatch {
            left: design.n,
            right: y.len(),
        });
    }
    if design.n <= design.p {
        return Err(Error::SeriesTooShort {
            needed: design.p + 1,
            got: design.n,
        });
    }
    let qr = QrFactors::factor(design)?;
    let mut qty = y.to_vec();
    qr.apply_qt(&mut qty);
    let coefficients = qr.solve_r(&qty[..design.p]);

    let mut fitted = vec![0.0; design.n];
    for j in 0..design.p {
        let c = coefficients[j];
        for i in 0..design.n {
            fitted[i] += c * design.get(i, j);
        }
    }
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    let sse = residuals.iter().map(|r| r * r).sum();
    let hat_diag = qr.hat_diag();

    Ok(OlsFit {
        coefficients,
        fitted,
        residuals,
        sse,
        hat_diag,
        n: design.n,
        p: design.p,
        x_offset: 0.0,
        x_scale: 1.0,
    })
}

/// Residual sum of squares only; the Granger test needs nothing else.
pub fn ols_sse(design: &Design, y: &[f64]) -> Result<f64> {
    if y.len() != design.n {
        return Err(Error::LengthMismatch {
            left: design.n,
            right: y.len(),
        });
    }
    if design.n <= design.p {
        return Err(Error::SeriesTooShort {
            needed: design.p + 1,
            got: design.n,
        });
    }
    let qr = QrFactors::factor(design)?;
    let mut qty = y.to_vec();
    qr.apply_qt(&mut qty);
    // After Q', the tail of y is orthogonal to the column space.
    Ok(qty[design.p..].iter().map(|v| v * v).sum())
}

/// Polynomial least squares. The abscissa is affinely rescaled to [-1, 1]
/// before powers are formed, so high-degree Vandermonde columns stay
/// well-conditioned; coefficients are reported in that rescaled basis.
pub fn polyfit_ols(x: &[f64], y: &[f64], degree: usize) -> Result<OlsFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    let p = degree + 1;
    if n <= p {
        return Err(Error::SeriesTooShort { needed: p + 1, got: n });
    }
    let (min, max) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(max > min) {
        return Err(Error::SingularDesign);
    }
    let offset = (max + min) / 2.0;
    let scale = 2.0 / (max - min);

    let mut design = Design::new(n, p);
    for i in 0..n {
        let u = (x[i] - offset) * scale;
        let mut pow = 1.0;
        for j in 0..p {
            design.set(i, j, pow);
            pow *= u;
        }
    }
    let mut fit = ols_fit(&design, y)?;
    fit.x_offset = offset;
    fit.x_scale = scale;
    Ok(fit)
}

/// Studentized residuals with Bonferroni-style flagging.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutlierReport {
    /// Externally studentized residual per sample.
    pub studentized: Vec<f64>,
    /// Effective threshold: `beta * t(1 - alpha/(2n); n - p - 1)`.
    pub bc_threshold: f64,
    pub outlier_indices: Vec<usize>,
}

/// Flags samples whose externally studentized residual exceeds the scaled
/// Bonferroni critical value:
/// `t_i = r_i * sqrt((n-p-1) / (SSE*(1-h_ii) - r_i^2))`,
/// `threshold = beta * t(1 - alpha/(2n); n-p-1)`.
///
/// Samples where the denominator degenerates (a residual so large it owns
/// the whole SSE) get `t = +/-inf` and are flagged by convention.
pub fn studentized_outliers(fit: &OlsFit, alpha: f64, beta: f64) -> Result<OutlierReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "outlier alpha must be in (0,1), got {alpha}"
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "outlier beta must be positive, got {beta}"
        )));
    }
    let n = fit.n;
    let p = fit.p;
    if n <= p + 1 {
        return Err(Error::SeriesTooShort { needed: p + 2, got: n });
    }
    let df = (n - p - 1) as f64;

    // A fit whose residuals are all at rounding level has no outliers.
    let y_scale = fit
        .fitted
        .iter()
        .zip(&fit.residuals)
        .map(|(f, r)| (f + r).abs())
        .fold(0.0f64, f64::max);
    let zero_tol = 1e-12 * (1.0 + y_scale);

    let mut studentized = Vec::with_capacity(n);
    for i in 0..n {
        let r = fit.residuals[i];
        if r.abs() <= zero_tol {
            studentized.push(0.0);
            continue;
        }
        let denom = fit.sse * (1.0 - fit.hat_diag[i]) - r * r;
        if denom <= 0.0 {
            studentized.push(if r > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY });
        } else {
            studentized.push(r * (df / denom).sqrt());
        }
    }

    let bc = beta * t_quantile(1.0 - alpha / (2.0 * n as f64), df)?;
    let outlier_indices: Vec<usize> = studentized
        .iter()
        .enumerate()
        .filter(|(_, t)| t.abs() > bc)
        .map(|(i, _)| i)
        .collect();

    Ok(OutlierReport {
        studentized,
        bc_threshold: bc,
        outlier_indices,
    })
}
