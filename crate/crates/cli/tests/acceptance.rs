//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers (visible under `--nocapture`).
//!
//! Thresholds are pinned in code; oracles (naive DFT, hand-unrolled
//! Kalman recursion, leave-one-out refits, finite differences) are
//! implemented here, independent of the library paths they check.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use vsxc_core::clusterlstm::{clusterlstm_train, make_windows, predict_one, ClusterLstmConfig};
use vsxc_core::fft::fft_real;
use vsxc_core::gbt::{audit_split_gains, gbt_fit_matrix, FeatureMatrix, GbtConfig};
use vsxc_core::kalman::{kalman_smooth, KalmanConfig};
use vsxc_core::lstm::{lstm_backward, lstm_forward, LayerDims, LstmWeights};
use vsxc_core::pipeline::{run_ablation, run_pipeline, PipelineConfig};
use vsxc_core::series::{rmse, TimeSeries};
use vsxc_core::stats::{granger_test, ljung_box, mann_kendall, polyfit_ols, studentized_outliers};
use vsxc_core::synth::{generate_synthetic, RegimeSpec, SynthSpec};
use vsxc_core::trend::{fit_segsigmoid, penalized_loss_and_gradient, sigmoid, TrendConfig};
use vsxc_core::vmd::{vmd_decompose, VmdParams};

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

fn variance(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / xs.len() as f64
}

#[test]
fn criterion_01_vmd_recovery() {
    let start = Instant::now();
    let n = 2048usize;
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let clean: Vec<f64> = (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * 10.0 * i as f64 / n as f64).sin())
        .collect();
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let e: f64 = StandardNormal.sample(&mut rng);
            0.5 * (i as f64 / (n - 1) as f64) + clean[i] + 0.01 * e
        })
        .collect();
    let var = variance(&values);
    let series = TimeSeries::from_values(values).unwrap();
    let d = vmd_decompose(&series, &VmdParams::default()).unwrap();
    let r = pearson(d.periodic.values(), &clean);
    let elapsed = start.elapsed();

    assert!(r > 0.95, "pearson r = {r}");
    assert!(
        d.recon_mse < 1e-3 * var,
        "recon_mse {} vs budget {}",
        d.recon_mse,
        1e-3 * var
    );
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "acceptance 01 (VMD recovery): PASS — r = {r:.4}, recon_mse/var = {:.2e}, {elapsed:.2?}",
        d.recon_mse / var
    );
}

#[test]
fn criterion_02_fft_oracle() {
    // Naive O(N^2) DFT, written here as the independent oracle.
    fn naive_dft(input: &[f64]) -> Vec<(f64, f64)> {
        let n = input.len();
        (0..n)
            .map(|k| {
                let mut re = 0.0;
                let mut im = 0.0;
                for (j, x) in input.iter().enumerate() {
                    let ang = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / n as f64;
                    re += x * ang.cos();
                    im += x * ang.sin();
                }
                (re, im)
            })
            .collect()
    }

    let mut worst = 0.0f64;
    for n in [8usize, 64, 256] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let signal: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let spec = fft_real(&signal).unwrap();
        let oracle = naive_dft(&signal);
        for (bin, (re, im)) in spec.bins.iter().zip(&oracle) {
            let d = ((bin.re - re).powi(2) + (bin.im - im).powi(2)).sqrt();
            worst = worst.max(d);
        }
    }
    assert!(worst < 1e-9, "max deviation {worst}");
    println!("acceptance 02 (FFT vs naive DFT): PASS — max |diff| = {worst:.2e}");
}

#[test]
fn criterion_03_kalman_oracle() {
    let observations = [3.0, 1.5, 4.2, 2.2, 5.1, 4.4, 3.3, 6.0, 5.5, 4.9];
    let (q, r) = (1.0, 16.0);

    // Hand-unrolled scalar recursion: first sample initializes (x = z0,
    // P = R); each later sample is predict/update.
    let mut expected = Vec::with_capacity(observations.len());
    let mut x = observations[0];
    let mut p = r;
    expected.push(x);
    for &z in &observations[1..] {
        let p_pred = p + q;
        let k = p_pred / (p_pred + r);
        x = x + k * (z - x);
        p = (1.0 - k) * p_pred;
        expected.push(x);
    }

    let series = TimeSeries::from_values(observations.to_vec()).unwrap();
    let out = kalman_smooth(&series, &KalmanConfig::default()).unwrap();
    let mut worst = 0.0f64;
    for (a, b) in out.values().iter().zip(&expected) {
        worst = worst.max((a - b).abs());
    }
    assert!(worst < 1e-12, "max deviation {worst}");
    println!("acceptance 03 (Kalman vs hand-unrolled recursion): PASS — max |diff| = {worst:.2e}");
}

#[test]
fn criterion_04_statistical_calibration() {
    let start = Instant::now();
    let n = 500usize;
    let reps = 200usize;

    let noise = |seed: u64| -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    };

    // Null rejection rates.
    let mut mk_rej = 0;
    let mut lb_rej = 0;
    let mut gr_rej = 0;
    for i in 0..reps {
        let x = noise(10_000 + i as u64);
        if mann_kendall(&x).unwrap().reject_at_05 {
            mk_rej += 1;
        }
        if ljung_box(&x, 1).unwrap().reject_at_05 {
            lb_rej += 1;
        }
        let cause = noise(20_000 + i as u64);
        if granger_test(&x, &cause, 4).unwrap().reject_at_05 {
            gr_rej += 1;
        }
    }
    let rates = [
        ("mann-kendall", mk_rej as f64 / reps as f64),
        ("ljung-box", lb_rej as f64 / reps as f64),
        ("granger", gr_rej as f64 / reps as f64),
    ];
    for (name, rate) in rates {
        assert!(
            (0.03..=0.08).contains(&rate),
            "{name} null rejection rate {rate}"
        );
    }

    // Power on the stated alternatives.
    let mut mk_pow = 0;
    let mut lb_pow = 0;
    let mut gr_pow = 0;
    for i in 0..reps {
        // Trend: slope 0.01 sigma per step.
        let mut x = noise(30_000 + i as u64);
        for (t, v) in x.iter_mut().enumerate() {
            *v += 0.01 * t as f64;
        }
        if mann_kendall(&x).unwrap().reject_at_05 {
            mk_pow += 1;
        }

        // AR(1) phi = 0.9.
        let e = noise(40_000 + i as u64);
        let mut ar = vec![0.0; n];
        for t in 1..n {
            ar[t] = 0.9 * ar[t - 1] + e[t];
        }
        if ljung_box(&ar, 1).unwrap().reject_at_05 {
            lb_pow += 1;
        }

        // Lagged cause.
        let cause = noise(50_000 + i as u64);
        let e2 = noise(60_000 + i as u64);
        let mut target = vec![0.0; n];
        for t in 1..n {
            target[t] = cause[t - 1] + 0.1 * e2[t];
        }
        if granger_test(&target, &cause, 4).unwrap().reject_at_05 {
            gr_pow += 1;
        }
    }
    for (name, count) in [("mann-kendall", mk_pow), ("ljung-box", lb_pow), ("granger", gr_pow)] {
        let rate = count as f64 / reps as f64;
        assert!(rate > 0.95, "{name} power {rate}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "acceptance 04 (statistical calibration): PASS — null rates mk/lb/granger = {:.3}/{:.3}/{:.3}, all powers > 0.95, {elapsed:.2?}",
        rates[0].1, rates[1].1, rates[2].1
    );
}

#[test]
fn criterion_05_studentized_loo_oracle() {
    fn solve_gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in (col + 1)..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..n {
                acc -= a[i][j] * x[j];
            }
            x[i] = acc / a[i][i];
        }
        x
    }

    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for (n, degree) in [(12usize, 1usize), (20, 2), (30, 3)] {
        let x: Vec<f64> = (0..n).map(|i| i as f64 + 0.3 * rng.random::<f64>()).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                let e: f64 = StandardNormal.sample(&mut rng);
                1.0 + 0.2 * v - 0.05 * v * v + 3.0 * e
            })
            .collect();
        let fit = polyfit_ols(&x, &y, degree).unwrap();
        let report = studentized_outliers(&fit, 0.05, 1.0).unwrap();

        let p = degree + 1;
        let row = |xi: f64| -> Vec<f64> {
            let u = (xi - fit.x_offset) * fit.x_scale;
            let mut r = Vec::with_capacity(p);
            let mut pow = 1.0;
            for _ in 0..p {
                r.push(pow);
                pow *= u;
            }
            r
        };

        for i in 0..n {
            let mut xtx = vec![vec![0.0; p]; p];
            let mut xty = vec![0.0; p];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let r = row(x[j]);
                for a_ in 0..p {
                    for b_ in 0..p {
                        xtx[a_][b_] += r[a_] * r[b_];
                    }
                    xty[a_] += r[a_] * y[j];
                }
            }
            let beta = solve_gauss(xtx.clone(), xty);
            let mut sse_i = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let r = row(x[j]);
                let pred: f64 = r.iter().zip(&beta).map(|(a, b)| a * b).sum();
                sse_i += (y[j] - pred) * (y[j] - pred);
            }
            let s_i = (sse_i / ((n - 1 - p) as f64)).sqrt();
            let ri = row(x[i]);
            let pred_i: f64 = ri.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let z = solve_gauss(xtx, ri.clone());
            let quad: f64 = ri.iter().zip(&z).map(|(a, b)| a * b).sum();
            let oracle = (y[i] - pred_i) / (s_i * (1.0 + quad).sqrt());

            let got = report.studentized[i];
            let err = (got - oracle).abs() / (1.0 + oracle.abs());
            worst = worst.max(err);
            assert!(err < 1e-6, "n={n} degree={degree} i={i}: {got} vs {oracle}");
        }
    }
    println!("acceptance 05 (studentized vs leave-one-out refit): PASS — max rel diff = {worst:.2e}");
}

#[test]
fn criterion_06_segsigmoid_gradients_and_recovery() {
    // Finite-difference check of the fitting gradient at random points.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let n = 80;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let y: Vec<f64> = t.iter().map(|ti| 5.0 * sigmoid(4.0 * ti - 2.0)).collect();
    let s = [0.2, 0.45, 0.7];
    let capacity = 6.0;
    let l1_weight = 2.0;

    let mut worst = 0.0f64;
    for _ in 0..5 {
        let k: f64 = rng.random_range(-3.0..8.0);
        let m: f64 = rng.random_range(-4.0..2.0);
        let delta: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..1.5)).collect();
        let (_, (gk, gm, gd)) =
            penalized_loss_and_gradient(&t, &y, &s, capacity, l1_weight, k, m, &delta);

        let h = 1e-6;
        let loss_at = |k: f64, m: f64, d: &[f64]| {
            penalized_loss_and_gradient(&t, &y, &s, capacity, l1_weight, k, m, d).0
        };
        let checks = {
            let mut v = vec![
                (gk, (loss_at(k + h, m, &delta) - loss_at(k - h, m, &delta)) / (2.0 * h)),
                (gm, (loss_at(k, m + h, &delta) - loss_at(k, m - h, &delta)) / (2.0 * h)),
            ];
            for j in 0..3 {
                let mut dp = delta.clone();
                dp[j] += h;
                let mut dm = delta.clone();
                dm[j] -= h;
                v.push((gd[j], (loss_at(k, m, &dp) - loss_at(k, m, &dm)) / (2.0 * h)));
            }
            v
        };
        for (analytic, fd) in checks {
            let err = (analytic - fd).abs() / fd.abs().max(analytic.abs()).max(1e-8);
            worst = worst.max(err);
            assert!(err < 1e-5, "analytic {analytic} vs fd {fd}");
        }
    }

    // Parameter recovery on clean logistic data with known capacity.
    let (c_true, k_true, m_true) = (10.0, 8.0, -4.0);
    let values: Vec<f64> = (0..400)
        .map(|i| {
            let ti = i as f64 / 399.0;
            c_true * sigmoid(k_true * ti + m_true)
        })
        .collect();
    let series = TimeSeries::from_values(values).unwrap();
    let report = fit_segsigmoid(
        &series,
        &[],
        &TrendConfig {
            capacity: Some(c_true),
            ..Default::default()
        },
    )
    .unwrap();
    let k_err = (report.model.base_rate - k_true).abs() / k_true.abs();
    let m_err = (report.model.base_offset - m_true).abs() / m_true.abs();
    assert!(k_err < 0.02, "k relative error {k_err}");
    assert!(m_err < 0.02, "m relative error {m_err}");
    println!(
        "acceptance 06 (SegSigmoid gradients + recovery): PASS — max grad rel err = {worst:.2e}, k/m rel err = {k_err:.2e}/{m_err:.2e}"
    );
}

#[test]
fn criterion_07_gbt_memorization_audit_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let rows = 200;
    let cols = 192;
    let features: Vec<f64> = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
    let targets: Vec<f64> = (0..rows).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
    let m = FeatureMatrix {
        n_rows: rows,
        n_cols: cols,
        data: features,
        targets,
    };
    let cfg = GbtConfig {
        max_depth: 6,
        learning_rate: 0.3,
        n_rounds: 400,
        lambda: 1.0,
        gamma: 0.0,
        early_stopping_rounds: None,
        ..Default::default()
    };
    let (model1, info) = gbt_fit_matrix(&m, &cfg).unwrap();
    let train_rmse = rmse(&info.train_predictions, &m.targets).unwrap();
    assert!(train_rmse < 1e-3, "memorization rmse {train_rmse}");

    audit_split_gains(&model1).unwrap();

    let (model2, _) = gbt_fit_matrix(&m, &cfg).unwrap();
    assert_eq!(model1, model2);
    assert_eq!(
        serde_json::to_string(&model1).unwrap(),
        serde_json::to_string(&model2).unwrap()
    );
    println!(
        "acceptance 07 (GBT memorization/audit/determinism): PASS — train rmse = {train_rmse:.2e}, {} trees bit-identical",
        model1.trees.len()
    );
}

#[test]
fn criterion_08_lstm_gradient_check() {
    let shape = vec![LayerDims { input: 1, hidden: 2 }];
    let w = LstmWeights::init(shape, 808);
    let window = [0.4, -0.9, 1.3];
    let target = 0.1;

    let mut grad = vec![0.0; w.params.len()];
    let y = lstm_backward(&w, &window, 1.0, &mut grad);
    let dl_dy = 2.0 * (y - target);
    let analytic: Vec<f64> = grad.iter().map(|g| g * dl_dy).collect();

    let h = 1e-5;
    let mut worst = 0.0f64;
    for j in 0..w.params.len() {
        let mut wp = w.clone();
        wp.params[j] += h;
        let yp = lstm_forward(&wp, &window).unwrap();
        let mut wm = w.clone();
        wm.params[j] -= h;
        let ym = lstm_forward(&wm, &window).unwrap();
        let fd = ((yp - target).powi(2) - (ym - target).powi(2)) / (2.0 * h);
        let err = (analytic[j] - fd).abs() / fd.abs().max(analytic[j].abs()).max(1e-8);
        worst = worst.max(err);
        assert!(err < 1e-4, "param {j}: analytic {} vs fd {fd}", analytic[j]);
    }
    println!("acceptance 08 (LSTM BPTT vs finite differences): PASS — max rel err = {worst:.2e}");
}

#[test]
fn criterion_09_clusterlstm_vs_lstm_and_grid_runtime() {
    // Directional comparison on regime-switching-variance AR(1) residuals.
    // The innovation scale sweeps 20x along a smooth envelope and the AR
    // coefficient swings with it (+0.95 quiet, -0.9 loud), so window scale
    // carries the dynamics — the heterogeneity the clustered model exists
    // for. Hard variance-only switching cannot show the effect: the optimal
    // one-step map is then scale-invariant and a single pooled LSTM already
    // sits at the information floor, while regime-switch shocks dominate
    // any boundary-adjacent evaluation.
    let mut wins = 0;
    let seeds = [1u64, 2, 3, 4, 5];
    for &seed in &seeds {
        let spec = SynthSpec {
            length: 1400,
            seed,
            cubic: [0.0; 4],
            amplitude: 0.0,
            ar_phi: 0.95,
            ar_sigma: 0.1,
            noise_sigma: 0.0,
            regime: Some(RegimeSpec {
                high_sigma: 2.0,
                block_len: 300,
                high_phi: Some(-0.9),
                smooth: true,
            }),
            ..Default::default()
        };
        let data = generate_synthetic(&spec).unwrap();
        let raw = data.residual;
        let split = 1200;
        let train = TimeSeries::from_values(raw[..split].to_vec()).unwrap();
        let windows = make_windows(&train, 24).unwrap();

        let mut test_rmse = |k: usize| -> f64 {
            let cfg = ClusterLstmConfig {
                k,
                epochs: 60,
                ..Default::default()
            };
            let (model, _) = clusterlstm_train(&windows, &cfg, seed).unwrap();
            let mut se = 0.0;
            let mut n = 0;
            for t in split..raw.len() {
                let (pred, _) = predict_one(&model, &raw[t - 24..t]).unwrap();
                se += (pred - raw[t]) * (pred - raw[t]);
                n += 1;
            }
            (se / n as f64).sqrt()
        };
        let clustered = test_rmse(4);
        let single = test_rmse(1);
        if clustered <= single {
            wins += 1;
        }
        println!(
            "  seed {seed}: k=4 rmse {clustered:.4} vs k=1 rmse {single:.4} ({})",
            if clustered <= single { "win" } else { "loss" }
        );
    }
    assert!(wins >= 4, "clustered model won only {wins}/5 seeds");

    // Full ablation grid at the default dataset scale.
    let start = Instant::now();
    let series = vsxc_core::pipeline::default_synthetic(2426, 7).unwrap();
    let cfg = PipelineConfig {
        skip_ga: true,
        ..Default::default()
    };
    let report = run_ablation(&series, &cfg).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(report.cells.len(), 4);
    assert!(report.cells.iter().all(|c| c.rmse.is_finite()));
    assert!(elapsed.as_secs_f64() < 300.0, "grid took {elapsed:?}");
    println!(
        "acceptance 09 (ClusterLSTM >= LSTM, grid runtime): PASS — {wins}/5 seeds, grid in {elapsed:.1?}"
    );
}

#[test]
fn criterion_10_paper_shaped_claims() {
    // Default synthetic scaled to unit variance. The filter stays off:
    // Kalman smoothing phase-shifts the periodic component by ~2.6 samples,
    // which parks decomposition zeros on test samples and makes the
    // periodic MAPE meaningless; the component-error claims are about the
    // decomposition models themselves.
    let data = generate_synthetic(&SynthSpec::default()).unwrap();
    let std = variance(data.series.values()).sqrt();
    let scaled: Vec<f64> = data.series.values().iter().map(|v| v / std).collect();
    let series = TimeSeries::new(data.series.timestamps().to_vec(), scaled).unwrap();

    let cfg = PipelineConfig {
        skip_ga: true,
        skip_kalman: true,
        ..Default::default()
    };
    let report = run_pipeline(&series, &cfg).unwrap();

    let t = &report.trend_metrics;
    let s = &report.periodic_metrics;
    assert!(t.rmse < 0.1, "trend rmse {}", t.rmse);
    assert!(s.rmse < 0.1, "periodic rmse {}", s.rmse);
    let t_mape = t.mape.expect("trend targets stay away from zero");
    let s_mape = s.mape.expect("periodic targets avoid exact zeros");
    assert!(t_mape < 0.1, "trend mape {t_mape}");
    assert!(s_mape < 0.1, "periodic mape {s_mape}");
    assert!(
        report.improvement_over_baseline >= 0.2,
        "improvement {}",
        report.improvement_over_baseline
    );
    println!(
        "acceptance 10 (unit-variance component errors): PASS — trend rmse/mape = {:.3}/{:.3}, periodic rmse/mape = {:.3}/{:.3}, beats persistence by {:.0}%",
        t.rmse,
        t_mape,
        s.rmse,
        s_mape,
        100.0 * report.improvement_over_baseline
    );
}

#[test]
fn criterion_11_cli_ablate_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["first.json", "second.json"] {
        let path = dir.path().join(name);
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_vsxc"))
            .args([
                "ablate",
                "--seed",
                "7",
                "--length",
                "700",
                "--output",
                path.to_str().unwrap(),
            ])
            .output()
            .expect("spawn vsxc");
        assert!(
            out.status.success(),
            "ablate failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push((std::fs::read(&path).unwrap(), out.stdout));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "report files differ");
    assert_eq!(outputs[0].1, outputs[1].1, "stdout tables differ");
    println!(
        "acceptance 11 (CLI ablate determinism): PASS — {} byte reports identical across runs",
        outputs[0].0.len()
    );
}
