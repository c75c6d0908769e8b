//! End-to-end orchestration: filter, GA-tuned decomposition, per-component
//! diagnostics, the three component models, recursive recomposition, and
//! the 2x2 ablation grid.
//!
//! Forecasting is strictly out-of-sample: test-time lags of every
//! component are fed from the models' own predictions, never from ground
//! truth. Diagnostics that fail to reject their nulls produce warnings in
//! the report instead of aborting the run.

use serde::{Deserialize, Serialize};

use crate::clusterlstm::{
    clusterlstm_predict, clusterlstm_train, make_windows, ClusterLstmConfig, ClusterLstmModel,
};
use crate::error::{Error, Result, StageExt};
use crate::ga::{ga_optimize, GaConfig};
use crate::gbt::{build_lag_matrix, forecast_periodic, gbt_fit, GbtConfig, GbtModel};
use crate::kalman::{kalman_smooth, KalmanConfig};
use crate::series::{mape, rmse, TimeSeries};
use crate::stats::{granger_test, ljung_box, mann_kendall, TestResult};
use crate::synth::{generate_synthetic, SynthSpec};
use crate::trend::{detect_changepoints, fit_segsigmoid, predict_trend, TrendConfig, TrendFitReport};
use crate::vmd::{vmd_decompose, Decomposition, VmdParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeriodicModelChoice {
    Gbt,
    Persistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualModelChoice {
    ClusterLstm,
    SingleLstm,
    Zero,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub kalman: KalmanConfig,
    pub skip_kalman: bool,
    pub vmd: VmdParams,
    pub ga: GaConfig,
    pub skip_ga: bool,
    pub split_ratio: f64,
    pub split_index: Option<usize>,
    pub seed: u64,
    /// Lag order of the periodic model's feature window.
    pub lag: usize,
    pub trend: TrendConfig,
    pub periodic_model: PeriodicModelChoice,
    pub gbt: GbtConfig,
    pub residual_model: ResidualModelChoice,
    pub clusterlstm: ClusterLstmConfig,
    /// Ljung-Box lag for the residual white-noise gate.
    pub lb_lag: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            kalman: KalmanConfig::default(),
            skip_kalman: false,
            vmd: VmdParams::default(),
            ga: GaConfig::default(),
            skip_ga: false,
            split_ratio: 0.9,
            split_index: None,
            seed: 42,
            lag: 48,
            trend: TrendConfig::default(),
            periodic_model: PeriodicModelChoice::Gbt,
            gbt: GbtConfig::default(),
            residual_model: ResidualModelChoice::ClusterLstm,
            clusterlstm: ClusterLstmConfig::default(),
            lb_lag: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComponentMetrics {
    pub rmse: f64,
    /// None when a target value is exactly zero.
    pub mape: Option<f64>,
    pub n: usize,
}

impl ComponentMetrics {
    fn compute(pred: &[f64], target: &[f64]) -> Result<Self> {
        Ok(Self {
            rmse: rmse(pred, target)?,
            mape: mape(pred, target).ok(),
            n: pred.len(),
        })
    }
}

/// Diagnostic outcomes. A test that cannot run on the data at hand (for
/// example a Granger design made singular by perfectly collinear lags)
/// reports None plus a warning instead of aborting the pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub mann_kendall_trend: Option<TestResult>,
    pub granger_y_to_s: Option<TestResult>,
    pub granger_t_to_s: Option<TestResult>,
    pub granger_r_to_s: Option<TestResult>,
    pub ljung_box_residual: Option<TestResult>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaSummary {
    pub best_alpha: f64,
    pub best_tau: f64,
    pub best_fitness: f64,
    pub generations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionFrame {
    pub timestamps: Vec<i64>,
    pub trend: Vec<f64>,
    pub periodic: Vec<f64>,
    pub residual: Vec<f64>,
    pub total: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastReport {
    pub n_train: usize,
    pub n_test: usize,
    pub alpha_used: f64,
    pub tau_used: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaSummary>,
    pub center_freqs: Vec<f64>,
    pub recon_mse: f64,
    pub vmd_iterations: usize,
    pub vmd_converged: bool,
    pub n_changepoints: usize,
    pub diagnostics: DiagnosticsReport,
    pub trend_metrics: ComponentMetrics,
    pub periodic_metrics: ComponentMetrics,
    pub residual_metrics: ComponentMetrics,
    pub total_metrics: ComponentMetrics,
    /// Last-value persistence forecast error on the same target.
    pub baseline_rmse: f64,
    /// `1 - total_rmse / baseline_rmse`.
    pub improvement_over_baseline: f64,
    pub predictions: PredictionFrame,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationCell {
    pub periodic_model: PeriodicModelChoice,
    pub residual_model: ResidualModelChoice,
    pub rmse: f64,
    pub mape: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationReport {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub alpha_used: f64,
    pub tau_used: f64,
    pub baseline_rmse: f64,
    /// Grid in the fixed order (gbt, cluster-lstm), (persistence,
    /// cluster-lstm), (gbt, single-lstm), (persistence, single-lstm).
    pub cells: Vec<AblationCell>,
}

/// Everything shared between a plain run and the ablation grid: the
/// filtered series, tuned decomposition, chronological split, trend model,
/// and diagnostics.
struct Prepared {
    decomp: Decomposition,
    filtered: TimeSeries,
    split_idx: usize,
    trend_report: TrendFitReport,
    trend_hat: Vec<f64>,
    diagnostics: DiagnosticsReport,
    alpha_used: f64,
    tau_used: f64,
    ga: Option<GaSummary>,
}

impl Prepared {
    fn horizon(&self) -> usize {
        self.filtered.len() - self.split_idx
    }

    fn train_values<'a>(&self, series: &'a TimeSeries) -> &'a [f64] {
        &series.values()[..self.split_idx]
    }

    fn test_values<'a>(&self, series: &'a TimeSeries) -> &'a [f64] {
        &series.values()[self.split_idx..]
    }
}

fn prepare(series: &TimeSeries, cfg: &PipelineConfig) -> Result<Prepared> {
    if series.len() < 2 * cfg.lag.max(cfg.clusterlstm.window) + 16 {
        return Err(Error::SeriesTooShort {
            needed: 2 * cfg.lag.max(cfg.clusterlstm.window) + 16,
            got: series.len(),
        })
        .stage("validate");
    }

    let filtered = if cfg.skip_kalman {
        series.clone()
    } else {
        kalman_smooth(series, &cfg.kalman).stage("filter")?
    };

    let (alpha_used, tau_used, ga_summary) = if cfg.skip_ga {
        (cfg.vmd.alpha, cfg.vmd.tau, None)
    } else {
        let ga_cfg = GaConfig {
            seed: cfg.seed,
            ..cfg.ga
        };
        let result = ga_optimize(&filtered, &ga_cfg, &cfg.vmd).stage("tune")?;
        let summary = GaSummary {
            best_alpha: result.best_alpha,
            best_tau: result.best_tau,
            best_fitness: result.best_fitness,
            generations: result.history.len().saturating_sub(1),
        };
        (result.best_alpha, result.best_tau, Some(summary))
    };

    let decomp = vmd_decompose(
        &filtered,
        &VmdParams {
            alpha: alpha_used,
            tau: tau_used,
            ..cfg.vmd
        },
    )
    .stage("decompose")?;

    let n = filtered.len();
    let split_idx = match cfg.split_index {
        Some(idx) => {
            if idx == 0 || idx >= n {
                return Err(Error::InvalidParameter(format!(
                    "split index {idx} out of range for length {n}"
                )))
                .stage("validate");
            }
            idx
        }
        None => {
            if !(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "split ratio must be in (0,1), got {}",
                    cfg.split_ratio
                )))
                .stage("validate");
            }
            ((cfg.split_ratio * n as f64).floor() as usize).clamp(1, n - 1)
        }
    };
    if split_idx <= cfg.lag.max(cfg.clusterlstm.window) + 8 {
        return Err(Error::SeriesTooShort {
            needed: cfg.lag.max(cfg.clusterlstm.window) + 9,
            got: split_idx,
        })
        .stage("validate");
    }

    let t_train = &decomp.trend.values()[..split_idx];
    let s_train = &decomp.periodic.values()[..split_idx];
    let r_train = &decomp.residual.values()[..split_idx];
    let y_train = &filtered.values()[..split_idx];

    let diagnostics = run_diagnostics(t_train, s_train, r_train, y_train, cfg);

    let train_trend = TimeSeries::new(
        decomp.trend.timestamps()[..split_idx].to_vec(),
        t_train.to_vec(),
    )
    .stage("fit-trend")?;
    let changepoints = detect_changepoints(
        &train_trend,
        cfg.trend.alpha,
        cfg.trend.beta,
        cfg.trend.cp_range,
    )
    .stage("fit-trend")?;
    let trend_report = fit_segsigmoid(&train_trend, &changepoints, &cfg.trend).stage("fit-trend")?;
    let trend_hat = predict_trend(&trend_report.model, &filtered.timestamps()[split_idx..]);

    Ok(Prepared {
        decomp,
        filtered,
        split_idx,
        trend_report,
        trend_hat,
        diagnostics,
        alpha_used,
        tau_used,
        ga: ga_summary,
    })
}

fn run_diagnostics(
    t_train: &[f64],
    s_train: &[f64],
    r_train: &[f64],
    y_train: &[f64],
    cfg: &PipelineConfig,
) -> DiagnosticsReport {
    let mut warnings = Vec::new();
    let mut record = |name: &str, soft_warning: &str, result: Result<TestResult>| match result {
        Ok(test) => {
            if !test.reject_at_05 {
                warnings.push(format!("{name}: {soft_warning} (p = {:.4})", test.p_value));
            }
            Some(test)
        }
        Err(e) => {
            warnings.push(format!("{name}: test could not run: {e}"));
            None
        }
    };

    let lag = cfg.lag;
    let mk = record(
        "mann-kendall",
        "trend term shows no significant monotone trend; the trend model's assumptions may not hold",
        mann_kendall(t_train),
    );
    let g_y = record(
        "granger y->S",
        "y lags add no significant predictive power for S",
        granger_test(s_train, y_train, lag),
    );
    let g_t = record(
        "granger T->S",
        "T lags add no significant predictive power for S",
        granger_test(s_train, t_train, lag),
    );
    let g_r = record(
        "granger R->S",
        "R lags add no significant predictive power for S",
        granger_test(s_train, r_train, lag),
    );
    let lb = record(
        "ljung-box",
        "residual term looks like white noise; the residual model may not improve on zero",
        ljung_box(r_train, cfg.lb_lag),
    );
    DiagnosticsReport {
        mann_kendall_trend: mk,
        granger_y_to_s: g_y,
        granger_t_to_s: g_t,
        granger_r_to_s: g_r,
        ljung_box_residual: lb,
        warnings,
    }
}

fn slice_decomposition(d: &Decomposition, end: usize) -> Result<Decomposition> {
    let cut = |ts: &TimeSeries| {
        TimeSeries::new(ts.timestamps()[..end].to_vec(), ts.values()[..end].to_vec())
    };
    Ok(Decomposition {
        trend: cut(&d.trend)?,
        periodic: cut(&d.periodic)?,
        residual: cut(&d.residual)?,
        center_freqs: d.center_freqs.clone(),
        recon_mse: d.recon_mse,
        iterations: d.iterations,
        converged: d.converged,
    })
}

enum PeriodicModel {
    Gbt(Box<GbtModel>),
    Persistence { last: f64 },
}

enum ResidualModel {
    Lstm(Box<ClusterLstmModel>),
    Zero,
}

fn fit_periodic_model(
    prep: &Prepared,
    cfg: &PipelineConfig,
    choice: PeriodicModelChoice,
) -> Result<PeriodicModel> {
    match choice {
        PeriodicModelChoice::Persistence => Ok(PeriodicModel::Persistence {
            last: prep.train_values(&prep.decomp.periodic)[prep.split_idx - 1],
        }),
        PeriodicModelChoice::Gbt => {
            let train_decomp = slice_decomposition(&prep.decomp, prep.split_idx)?;
            let y_train = TimeSeries::new(
                prep.filtered.timestamps()[..prep.split_idx].to_vec(),
                prep.train_values(&prep.filtered).to_vec(),
            )?;
            let lm = build_lag_matrix(&train_decomp, &y_train, cfg.lag)?;
            let model = gbt_fit(&lm, &cfg.gbt)?;
            Ok(PeriodicModel::Gbt(Box::new(model)))
        }
    }
}

fn fit_residual_model(
    prep: &Prepared,
    cfg: &PipelineConfig,
    choice: ResidualModelChoice,
) -> Result<ResidualModel> {
    match choice {
        ResidualModelChoice::Zero => Ok(ResidualModel::Zero),
        ResidualModelChoice::ClusterLstm | ResidualModelChoice::SingleLstm => {
            let k = if choice == ResidualModelChoice::SingleLstm {
                1
            } else {
                cfg.clusterlstm.k
            };
            let train_residual = TimeSeries::new(
                prep.decomp.residual.timestamps()[..prep.split_idx].to_vec(),
                prep.train_values(&prep.decomp.residual).to_vec(),
            )?;
            let windows = make_windows(&train_residual, cfg.clusterlstm.window)?;
            let lstm_cfg = ClusterLstmConfig { k, ..cfg.clusterlstm };
            let (model, _info) = clusterlstm_train(&windows, &lstm_cfg, cfg.seed)?;
            Ok(ResidualModel::Lstm(Box::new(model)))
        }
    }
}

fn forecast_components(
    prep: &Prepared,
    periodic: &PeriodicModel,
    residual: &ResidualModel,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let horizon = prep.horizon();
    let r_train = prep.train_values(&prep.decomp.residual);

    let r_hat = match residual {
        ResidualModel::Zero => vec![0.0; horizon],
        ResidualModel::Lstm(model) => clusterlstm_predict(model, r_train, horizon)?,
    };

    let s_hat = match periodic {
        PeriodicModel::Persistence { last } => vec![*last; horizon],
        PeriodicModel::Gbt(model) => forecast_periodic(
            model,
            prep.train_values(&prep.decomp.trend),
            prep.train_values(&prep.decomp.periodic),
            r_train,
            prep.train_values(&prep.filtered),
            &prep.trend_hat,
            &r_hat,
            horizon,
        )?,
    };
    Ok((s_hat, r_hat))
}

fn persistence_baseline_rmse(prep: &Prepared) -> Result<f64> {
    let last = prep.train_values(&prep.filtered)[prep.split_idx - 1];
    let target = prep.test_values(&prep.filtered);
    let baseline = vec![last; target.len()];
    rmse(&baseline, target)
}

/// Runs the full pipeline on a series and evaluates against the held-out
/// tail.
pub fn run_pipeline(series: &TimeSeries, cfg: &PipelineConfig) -> Result<ForecastReport> {
    let prep = prepare(series, cfg)?;
    let periodic = fit_periodic_model(&prep, cfg, cfg.periodic_model).stage("fit-periodic")?;
    let residual = fit_residual_model(&prep, cfg, cfg.residual_model).stage("fit-residual")?;
    let (s_hat, r_hat) = forecast_components(&prep, &periodic, &residual).stage("predict")?;

    let t_hat = prep.trend_hat.clone();
    let total: Vec<f64> = t_hat
        .iter()
        .zip(&s_hat)
        .zip(&r_hat)
        .map(|((t, s), r)| t + s + r)
        .collect();

    let trend_metrics =
        ComponentMetrics::compute(&t_hat, prep.test_values(&prep.decomp.trend)).stage("evaluate")?;
    let periodic_metrics = ComponentMetrics::compute(&s_hat, prep.test_values(&prep.decomp.periodic))
        .stage("evaluate")?;
    let residual_metrics = ComponentMetrics::compute(&r_hat, prep.test_values(&prep.decomp.residual))
        .stage("evaluate")?;
    let total_metrics =
        ComponentMetrics::compute(&total, prep.test_values(&prep.filtered)).stage("evaluate")?;
    let baseline_rmse = persistence_baseline_rmse(&prep).stage("evaluate")?;

    Ok(ForecastReport {
        n_train: prep.split_idx,
        n_test: prep.horizon(),
        alpha_used: prep.alpha_used,
        tau_used: prep.tau_used,
        ga: prep.ga.clone(),
        center_freqs: prep.decomp.center_freqs.clone(),
        recon_mse: prep.decomp.recon_mse,
        vmd_iterations: prep.decomp.iterations,
        vmd_converged: prep.decomp.converged,
        n_changepoints: prep.trend_report.n_changepoints,
        diagnostics: prep.diagnostics.clone(),
        trend_metrics,
        periodic_metrics,
        residual_metrics,
        total_metrics,
        baseline_rmse,
        improvement_over_baseline: 1.0 - total_metrics.rmse / baseline_rmse,
        predictions: PredictionFrame {
            timestamps: prep.filtered.timestamps()[prep.split_idx..].to_vec(),
            trend: t_hat,
            periodic: s_hat,
            residual: r_hat,
            total,
        },
        runtime_seconds: None,
    })
}

/// Runs the 2x2 grid {gbt, persistence} x {cluster-lstm, single-lstm} with
/// one shared decomposition and trend model, so the cells differ only in
/// the component models under ablation.
pub fn run_ablation(series: &TimeSeries, cfg: &PipelineConfig) -> Result<AblationReport> {
    let prep = prepare(series, cfg)?;

    let gbt_model = fit_periodic_model(&prep, cfg, PeriodicModelChoice::Gbt).stage("fit-periodic")?;
    let persistence =
        fit_periodic_model(&prep, cfg, PeriodicModelChoice::Persistence).stage("fit-periodic")?;
    let cluster = fit_residual_model(&prep, cfg, ResidualModelChoice::ClusterLstm)
        .stage("fit-residual")?;
    let single =
        fit_residual_model(&prep, cfg, ResidualModelChoice::SingleLstm).stage("fit-residual")?;

    let grid = [
        (PeriodicModelChoice::Gbt, ResidualModelChoice::ClusterLstm, &gbt_model, &cluster),
        (PeriodicModelChoice::Persistence, ResidualModelChoice::ClusterLstm, &persistence, &cluster),
        (PeriodicModelChoice::Gbt, ResidualModelChoice::SingleLstm, &gbt_model, &single),
        (PeriodicModelChoice::Persistence, ResidualModelChoice::SingleLstm, &persistence, &single),
    ];

    let target = prep.test_values(&prep.filtered);
    let mut cells = Vec::with_capacity(4);
    for (p_choice, r_choice, p_model, r_model) in grid {
        let (s_hat, r_hat) = forecast_components(&prep, p_model, r_model).stage("predict")?;
        let total: Vec<f64> = prep
            .trend_hat
            .iter()
            .zip(&s_hat)
            .zip(&r_hat)
            .map(|((t, s), r)| t + s + r)
            .collect();
        cells.push(AblationCell {
            periodic_model: p_choice,
            residual_model: r_choice,
            rmse: rmse(&total, target).stage("evaluate")?,
            mape: mape(&total, target).ok(),
        });
    }

    Ok(AblationReport {
        seed: cfg.seed,
        n_train: prep.split_idx,
        n_test: prep.horizon(),
        alpha_used: prep.alpha_used,
        tau_used: prep.tau_used,
        baseline_rmse: persistence_baseline_rmse(&prep).stage("evaluate")?,
        cells,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RollingFold {
    pub split_index: usize,
    pub horizon: usize,
    pub rmse: f64,
    pub mape: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RollingReport {
    pub folds: Vec<RollingFold>,
    pub mean_rmse: f64,
}

/// Rolling-origin evaluation: the nominal test span is divided into
/// `folds` chunks and the pipeline is refit at each successive origin,
/// forecasting one chunk at a time.
pub fn rolling_origin(series: &TimeSeries, cfg: &PipelineConfig, folds: usize) -> Result<RollingReport> {
    if folds == 0 {
        return Err(Error::InvalidParameter("folds must be >= 1".into()));
    }
    let n = series.len();
    let base_idx = ((cfg.split_ratio * n as f64).floor() as usize).clamp(1, n - 1);
    let chunk = (n - base_idx) / folds;
    if chunk == 0 {
        return Err(Error::SeriesTooShort {
            needed: base_idx + folds,
            got: n,
        });
    }
    let mut out = Vec::with_capacity(folds);
    for fold in 0..folds {
        let split = base_idx + fold * chunk;
        let end = if fold == folds - 1 { n } else { split + chunk };
        let sub = TimeSeries::new(
            series.timestamps()[..end].to_vec(),
            series.values()[..end].to_vec(),
        )?;
        let fold_cfg = PipelineConfig {
            split_index: Some(split),
            ..cfg.clone()
        };
        let report = run_pipeline(&sub, &fold_cfg)?;
        out.push(RollingFold {
            split_index: split,
            horizon: end - split,
            rmse: report.total_metrics.rmse,
            mape: report.total_metrics.mape,
        });
    }
    let mean_rmse = out.iter().map(|f| f.rmse).sum::<f64>() / out.len() as f64;
    Ok(RollingReport { folds: out, mean_rmse })
}

/// The default synthetic dataset used when no input file is given.
pub fn default_synthetic(length: usize, seed: u64) -> Result<TimeSeries> {
    let data = generate_synthetic(&SynthSpec {
        length,
        seed,
        ..Default::default()
    })?;
    Ok(data.series)
}
