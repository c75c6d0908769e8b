//! Self-contained statistical machinery: special functions, OLS with
//! leverage diagnostics, studentized-residual outlier detection, and the
//! trend/white-noise/causality tests the pipeline's diagnostics run.

mod hypothesis;
mod ols;
mod special;

pub use hypothesis::{acf, granger_test, ljung_box, mann_kendall, TestResult};
pub use ols::{ols_fit, ols_sse, polyfit_ols, studentized_outliers, Design, OlsFit, OutlierReport};
pub use special::{beta_inc, chi2_cdf, f_cdf, gamma_p, ln_gamma, normal_cdf, t_cdf, t_quantile};
