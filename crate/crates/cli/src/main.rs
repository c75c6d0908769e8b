//! `vsxc` — decomposition-based displacement forecasting from the command
//! line. Subcommands mirror the pipeline stages so each step can run
//! standalone on CSV files, plus `predict`/`ablate` for end-to-end runs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vsxc_core::clusterlstm::{clusterlstm_train, make_windows, ClusterLstmConfig};
use vsxc_core::ga::{ga_optimize, GaConfig};
use vsxc_core::gbt::{build_lag_matrix, gbt_fit, GbtConfig};
use vsxc_core::kalman::{kalman_smooth, KalmanConfig};
use vsxc_core::pipeline::{
    rolling_origin, run_ablation, run_pipeline, AblationReport, PipelineConfig,
};
use vsxc_core::series::{load_csv, save_csv, MetricsReport, TimeSeries};
use vsxc_core::stats::{acf, granger_test, ljung_box, mann_kendall};
use vsxc_core::synth::{generate_synthetic, RegimeSpec, SynthSpec};
use vsxc_core::trend::{detect_changepoints, fit_segsigmoid, TrendConfig};
use vsxc_core::vmd::{vmd_decompose, Decomposition, VmdParams};

#[derive(Parser)]
#[command(
    name = "vsxc",
    about = "Decomposition-based time-series forecasting: Kalman smoothing, GA-tuned VMD, per-component models, recomposition",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV (header row required; optional `timestamp` column).
    #[arg(long)]
    input: PathBuf,
    /// Name of the value column.
    #[arg(long, default_value = "value")]
    value_column: String,
}

impl InputArgs {
    fn load(&self) -> Result<TimeSeries> {
        Ok(load_csv(&self.input, &self.value_column)?)
    }
}

#[derive(Args)]
struct VmdArgs {
    #[arg(long, default_value_t = 2000.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Let the first mode's centre frequency float instead of pinning it
    /// at zero.
    #[arg(long)]
    no_dc: bool,
}

impl VmdArgs {
    fn params(&self) -> VmdParams {
        VmdParams {
            k_modes: self.k,
            alpha: self.alpha,
            tau: self.tau,
            tol: self.tol,
            max_iter: self.max_iter,
            dc_mode: !self.no_dc,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Kalman-smooth a series.
    Filter {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output: PathBuf,
        /// Process noise variance Q.
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Measurement noise variance R.
        #[arg(long, default_value_t = 16.0)]
        r: f64,
        /// Initial state (defaults to the first observation).
        #[arg(long)]
        x0: Option<f64>,
        /// Initial covariance (defaults to R).
        #[arg(long)]
        p0: Option<f64>,
    },
    /// Decompose a series into trend/periodic/residual components.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        vmd: VmdArgs,
        /// Writes `<prefix>_T.csv`, `<prefix>_S.csv`, `<prefix>_R.csv`
        /// and `<prefix>_summary.json`.
        #[arg(long)]
        out_prefix: String,
    },
    /// Search VMD hyperparameters (alpha, tau) with the genetic algorithm.
    Tune {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 50)]
        pop: usize,
        #[arg(long, default_value_t = 100)]
        gens: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        crossover: f64,
        #[arg(long, default_value_t = 0.1)]
        mutation: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha_lo: f64,
        #[arg(long, default_value_t = 5000.0)]
        alpha_hi: f64,
        #[arg(long, default_value_t = 0.0)]
        tau_lo: f64,
        #[arg(long, default_value_t = 1.0)]
        tau_hi: f64,
        /// VMD settings held fixed during the search.
        #[command(flatten)]
        vmd: VmdArgs,
        /// Output JSON path (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Statistical checks on decomposed components: Mann-Kendall on T,
    /// ACF and Granger causality for S, Ljung-Box on R.
    Diagnose {
        #[arg(long)]
        trend: PathBuf,
        #[arg(long)]
        periodic: PathBuf,
        #[arg(long)]
        residual: PathBuf,
        /// Original series; reconstructed as T+S+R when omitted.
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, default_value = "value")]
        value_column: String,
        /// Granger/ACF lag order.
        #[arg(long, default_value_t = 48)]
        lag: usize,
        /// Ljung-Box lag.
        #[arg(long, default_value_t = 1)]
        lb_lag: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit the piecewise-logistic trend model.
    FitTrend {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output: PathBuf,
        /// Outlier significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Bonferroni threshold scale.
        #[arg(long, default_value_t = 1.0 / 6.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.95)]
        cp_range: f64,
        /// Laplace scale of the rate-change prior.
        #[arg(long, default_value_t = 0.5)]
        tau_cp: f64,
        /// Saturation capacity (default 1.1 x training max).
        #[arg(long)]
        capacity: Option<f64>,
        #[arg(long, default_value_t = 20_000)]
        epochs: usize,
    },
    /// Fit the gradient-boosted periodic model on lagged components.
    FitPeriodic {
        #[arg(long)]
        trend: PathBuf,
        #[arg(long)]
        periodic: PathBuf,
        #[arg(long)]
        residual: PathBuf,
        /// Original series; reconstructed as T+S+R when omitted.
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, default_value = "value")]
        value_column: String,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 48)]
        lag: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        #[arg(long, default_value_t = 300)]
        rounds: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Early-stopping patience in rounds; 0 disables early stopping.
        #[arg(long, default_value_t = 30)]
        early_stop: usize,
    },
    /// Fit the clustered-LSTM residual model.
    FitResidual {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 24)]
        window: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 1e-2)]
        lr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Train even when the residual passes the white-noise test.
        #[arg(long)]
        force: bool,
    },
    /// Run the full pipeline and write forecasts plus a report.
    Predict {
        /// Pipeline configuration JSON; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Input CSV; the default synthetic dataset when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "value")]
        value_column: String,
        #[arg(long)]
        out_dir: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Length of the default synthetic dataset when no input is given.
        #[arg(long, default_value_t = 2426)]
        length: usize,
    },
    /// Compare a prediction CSV against a target CSV, or run
    /// rolling-origin evaluation of the pipeline.
    Evaluate {
        #[arg(long, required_unless_present = "rolling")]
        pred: Option<PathBuf>,
        #[arg(long, required_unless_present = "rolling")]
        target: Option<PathBuf>,
        #[arg(long, default_value = "value")]
        value_column: String,
        /// Rolling-origin folds; refits the pipeline at each origin.
        #[arg(long)]
        rolling: Option<usize>,
        /// Input CSV for rolling-origin mode.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate the seeded synthetic dataset with ground-truth components.
    Synth {
        /// Writes `<prefix>.csv` plus `_trend/_periodic/_residual/_noise`.
        #[arg(long)]
        out_prefix: String,
        #[arg(long, default_value_t = 2426)]
        length: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 24.0)]
        period: f64,
        #[arg(long, default_value_t = 0.8)]
        ar_phi: f64,
        #[arg(long, default_value_t = 0.15)]
        ar_sigma: f64,
        #[arg(long, default_value_t = 0.05)]
        noise_sigma: f64,
        /// High AR innovation scale for regime switching.
        #[arg(long)]
        regime_high: Option<f64>,
        /// Regime block length in samples.
        #[arg(long, default_value_t = 200)]
        regime_block: usize,
        /// AR coefficient inside high-sigma blocks.
        #[arg(long)]
        regime_phi: Option<f64>,
        /// Blend regimes along a smooth sinusoidal envelope.
        #[arg(long)]
        regime_smooth: bool,
    },
    /// Run the 2x2 ablation grid (periodic x residual models).
    Ablate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Input CSV; the default synthetic dataset when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "value")]
        value_column: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Length of the default synthetic dataset when no input is given.
        #[arg(long, default_value_t = 2426)]
        length: usize,
        /// Report JSON path (stdout table is always printed).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn load_pipeline_config(path: Option<&Path>, seed: Option<u64>) -> Result<PipelineConfig> {
    let mut cfg: PipelineConfig = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn reconstruct_series(
    trend: &TimeSeries,
    periodic: &TimeSeries,
    residual: &TimeSeries,
) -> Result<TimeSeries> {
    if periodic.len() != trend.len() || residual.len() != trend.len() {
        bail!(
            "component lengths differ: T={}, S={}, R={}",
            trend.len(),
            periodic.len(),
            residual.len()
        );
    }
    let values: Vec<f64> = trend
        .values()
        .iter()
        .zip(periodic.values())
        .zip(residual.values())
        .map(|((t, s), r)| t + s + r)
        .collect();
    Ok(trend.with_values(values)?)
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Filter { input, output, q, r, x0, p0 } => {
            let series = input.load()?;
            let cfg = KalmanConfig { q, r, x0, p0 };
            let filtered = kalman_smooth(&series, &cfg)?;
            save_csv(&filtered, &output)?;
            eprintln!("filtered {} samples -> {}", filtered.len(), output.display());
        }
        Command::Decompose { input, vmd, out_prefix } => {
            let series = input.load()?;
            let d = vmd_decompose(&series, &vmd.params())?;
            save_component_files(&d, &out_prefix)?;
            #[derive(serde::Serialize)]
            struct Summary<'a> {
                center_freqs: &'a [f64],
                recon_mse: f64,
                iterations: usize,
                converged: bool,
            }
            write_json(
                &Summary {
                    center_freqs: &d.center_freqs,
                    recon_mse: d.recon_mse,
                    iterations: d.iterations,
                    converged: d.converged,
                },
                Some(Path::new(&format!("{out_prefix}_summary.json"))),
            )?;
            eprintln!(
                "decomposed into {out_prefix}_{{T,S,R}}.csv (recon_mse {:.3e}, {} iterations)",
                d.recon_mse, d.iterations
            );
        }
        Command::Tune {
            input,
            pop,
            gens,
            seed,
            crossover,
            mutation,
            alpha_lo,
            alpha_hi,
            tau_lo,
            tau_hi,
            vmd,
            output,
        } => {
            let series = input.load()?;
            let cfg = GaConfig {
                pop_size: pop,
                generations: gens,
                crossover_p: crossover,
                mutation_p: mutation,
                alpha_bounds: (alpha_lo, alpha_hi),
                tau_bounds: (tau_lo, tau_hi),
                seed,
            };
            let result = ga_optimize(&series, &cfg, &vmd.params())?;
            write_json(&result, output.as_deref())?;
        }
        Command::Diagnose {
            trend,
            periodic,
            residual,
            series,
            value_column,
            lag,
            lb_lag,
            output,
        } => {
            let t = load_csv(&trend, &value_column)?;
            let s = load_csv(&periodic, &value_column)?;
            let r = load_csv(&residual, &value_column)?;
            let y = match series {
                Some(p) => load_csv(&p, &value_column)?,
                None => reconstruct_series(&t, &s, &r)?,
            };
            let report =
                diagnose_components(t.values(), s.values(), r.values(), y.values(), lag, lb_lag);
            write_json(&report, output.as_deref())?;
        }
        Command::FitTrend {
            input,
            output,
            alpha,
            beta,
            cp_range,
            tau_cp,
            capacity,
            epochs,
        } => {
            let series = input.load()?;
            let cfg = TrendConfig {
                alpha,
                beta,
                cp_range,
                tau_cp,
                capacity,
                max_epochs: epochs,
                ..Default::default()
            };
            let cps = detect_changepoints(&series, alpha, beta, cp_range)?;
            let report = fit_segsigmoid(&series, &cps, &cfg)?;
            write_json(&report, Some(output.as_path()))?;
            eprintln!(
                "fit trend with {} changepoints, train rmse {:.4e} -> {}",
                report.n_changepoints,
                report.train_rmse,
                output.display()
            );
        }
        Command::FitPeriodic {
            trend,
            periodic,
            residual,
            series,
            value_column,
            output,
            lag,
            depth,
            eta,
            rounds,
            lambda,
            gamma,
            early_stop,
        } => {
            let t = load_csv(&trend, &value_column)?;
            let s = load_csv(&periodic, &value_column)?;
            let r = load_csv(&residual, &value_column)?;
            let y = match series {
                Some(p) => load_csv(&p, &value_column)?,
                None => reconstruct_series(&t, &s, &r)?,
            };
            let d = Decomposition {
                trend: t,
                periodic: s,
                residual: r,
                center_freqs: Vec::new(),
                recon_mse: 0.0,
                iterations: 0,
                converged: true,
            };
            let lm = build_lag_matrix(&d, &y, lag)?;
            let cfg = GbtConfig {
                max_depth: depth,
                learning_rate: eta,
                n_rounds: rounds,
                lambda,
                gamma,
                early_stopping_rounds: if early_stop == 0 { None } else { Some(early_stop) },
                ..Default::default()
            };
            let model = gbt_fit(&lm, &cfg)?;
            write_json(&model, Some(output.as_path()))?;
            eprintln!(
                "fit periodic model: {} trees over {} rows -> {}",
                model.trees.len(),
                lm.matrix.n_rows,
                output.display()
            );
        }
        Command::FitResidual {
            input,
            output,
            k,
            window,
            epochs,
            lr,
            seed,
            force,
        } => {
            let series = input.load()?;
            let lb = ljung_box(series.values(), 1)?;
            if !lb.reject_at_05 && !force {
                return Err(vsxc_core::Error::WhiteNoiseGate { p: lb.p_value }.into());
            }
            if !lb.reject_at_05 {
                eprintln!(
                    "warning: residual passed the white-noise test (p = {:.4}); training anyway (--force)",
                    lb.p_value
                );
            }
            let windows = make_windows(&series, window)?;
            let cfg = ClusterLstmConfig {
                k,
                window,
                epochs,
                learning_rate: lr,
                ..Default::default()
            };
            let (model, _info) = clusterlstm_train(&windows, &cfg, seed)?;
            write_json(&model, Some(output.as_path()))?;
            eprintln!(
                "fit residual model: k={} over {} windows -> {}",
                k,
                windows.windows.len(),
                output.display()
            );
        }
        Command::Predict {
            config,
            input,
            value_column,
            out_dir,
            seed,
            length,
        } => {
            let cfg = load_pipeline_config(config.as_deref(), seed)?;
            let series = match input {
                Some(p) => load_csv(&p, &value_column)?,
                None => vsxc_core::pipeline::default_synthetic(length, cfg.seed)?,
            };
            let start = std::time::Instant::now();
            let mut report = run_pipeline(&series, &cfg)?;
            report.runtime_seconds = Some(start.elapsed().as_secs_f64());

            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let pred_path = out_dir.join("predictions.csv");
            write_predictions_csv(&report, &pred_path)?;
            write_json(&report, Some(out_dir.join("report.json").as_path()))?;
            for w in &report.diagnostics.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "test rmse {:.4} (baseline {:.4}, improvement {:.1}%) -> {}",
                report.total_metrics.rmse,
                report.baseline_rmse,
                100.0 * report.improvement_over_baseline,
                out_dir.display()
            );
        }
        Command::Evaluate {
            pred,
            target,
            value_column,
            rolling,
            input,
            config,
            output,
        } => match rolling {
            Some(folds) => {
                let input = input.context("--rolling requires --input")?;
                let series = load_csv(&input, &value_column)?;
                let cfg = load_pipeline_config(config.as_deref(), None)?;
                let report = rolling_origin(&series, &cfg, folds)?;
                write_json(&report, output.as_deref())?;
            }
            None => {
                let pred = load_csv(&pred.expect("required by clap"), &value_column)?;
                let target = load_csv(&target.expect("required by clap"), &value_column)?;
                let metrics = MetricsReport::compute(pred.values(), target.values())?;
                write_json(&metrics, output.as_deref())?;
            }
        },
        Command::Synth {
            out_prefix,
            length,
            seed,
            amplitude,
            period,
            ar_phi,
            ar_sigma,
            noise_sigma,
            regime_high,
            regime_block,
            regime_phi,
            regime_smooth,
        } => {
            let spec = SynthSpec {
                length,
                seed,
                amplitude,
                period,
                ar_phi,
                ar_sigma,
                noise_sigma,
                regime: regime_high.map(|high_sigma| RegimeSpec {
                    high_sigma,
                    block_len: regime_block,
                    high_phi: regime_phi,
                    smooth: regime_smooth,
                }),
                ..Default::default()
            };
            let data = generate_synthetic(&spec)?;
            save_csv(&data.series, Path::new(&format!("{out_prefix}.csv")))?;
            for (name, values) in [
                ("trend", &data.trend),
                ("periodic", &data.periodic),
                ("residual", &data.residual),
                ("noise", &data.noise),
            ] {
                let ts = data.series.with_values(values.clone())?;
                save_csv(&ts, Path::new(&format!("{out_prefix}_{name}.csv")))?;
            }
            eprintln!("wrote {out_prefix}.csv and component files ({length} samples, seed {seed})");
        }
        Command::Ablate {
            config,
            input,
            value_column,
            seed,
            length,
            output,
        } => {
            let cfg = load_pipeline_config(config.as_deref(), Some(seed))?;
            let series = match input {
                Some(p) => load_csv(&p, &value_column)?,
                None => vsxc_core::pipeline::default_synthetic(length, cfg.seed)?,
            };
            let report = run_ablation(&series, &cfg)?;
            print_ablation_table(&report);
            if let Some(path) = output {
                write_json(&report, Some(path.as_path()))?;
            }
        }
    }
    Ok(())
}

fn save_component_files(d: &Decomposition, prefix: &str) -> Result<()> {
    save_csv(&d.trend, Path::new(&format!("{prefix}_T.csv")))?;
    save_csv(&d.periodic, Path::new(&format!("{prefix}_S.csv")))?;
    save_csv(&d.residual, Path::new(&format!("{prefix}_R.csv")))?;
    Ok(())
}

#[derive(serde::Serialize)]
struct DiagnoseOutput {
    mann_kendall_trend: Option<vsxc_core::stats::TestResult>,
    acf_periodic: Option<Vec<f64>>,
    granger_y_to_s: Option<vsxc_core::stats::TestResult>,
    granger_t_to_s: Option<vsxc_core::stats::TestResult>,
    granger_r_to_s: Option<vsxc_core::stats::TestResult>,
    ljung_box_residual: Option<vsxc_core::stats::TestResult>,
    errors: Vec<String>,
}

fn diagnose_components(
    t: &[f64],
    s: &[f64],
    r: &[f64],
    y: &[f64],
    lag: usize,
    lb_lag: usize,
) -> DiagnoseOutput {
    let mut errors = Vec::new();
    let mut track = |name: &str, res: vsxc_core::Result<vsxc_core::stats::TestResult>| match res {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("{name}: {e}"));
            None
        }
    };
    let mk = track("mann-kendall", mann_kendall(t));
    let g_y = track("granger y->S", granger_test(s, y, lag));
    let g_t = track("granger T->S", granger_test(s, t, lag));
    let g_r = track("granger R->S", granger_test(s, r, lag));
    let lb = track("ljung-box", ljung_box(r, lb_lag));
    let acf_periodic = match acf(s, lag.min(s.len().saturating_sub(1))) {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("acf: {e}"));
            None
        }
    };
    DiagnoseOutput {
        mann_kendall_trend: mk,
        acf_periodic,
        granger_y_to_s: g_y,
        granger_t_to_s: g_t,
        granger_r_to_s: g_r,
        ljung_box_residual: lb,
        errors,
    }
}

fn write_predictions_csv(report: &vsxc_core::pipeline::ForecastReport, path: &Path) -> Result<()> {
    let p = &report.predictions;
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    writer.write_record(["timestamp", "trend", "periodic", "residual", "total"])?;
    for i in 0..p.timestamps.len() {
        writer.write_record([
            p.timestamps[i].to_string(),
            format!("{:?}", p.trend[i]),
            format!("{:?}", p.periodic[i]),
            format!("{:?}", p.residual[i]),
            format!("{:?}", p.total[i]),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn print_ablation_table(report: &AblationReport) {
    println!(
        "{:<14} {:<14} {:>10} {:>10}",
        "periodic", "residual", "RMSE", "MAPE"
    );
    for cell in &report.cells {
        let mape = cell
            .mape
            .map(|m| format!("{m:.4}"))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "{:<14} {:<14} {:>10.4} {:>10}",
            format!("{:?}", cell.periodic_model).to_lowercase(),
            format!("{:?}", cell.residual_model).to_lowercase(),
            cell.rmse,
            mape
        );
    }
    println!(
        "persistence baseline rmse {:.4} (train {}, test {}, alpha {:.4}, tau {:.4})",
        report.baseline_rmse, report.n_train, report.n_test, report.alpha_used, report.tau_used
    );
}
