use vsxc_core::pipeline::{run_pipeline, PipelineConfig};
use vsxc_core::series::TimeSeries;
use vsxc_core::synth::{generate_synthetic, SynthSpec};
use vsxc_core::gbt::GbtConfig;

fn main() {
    for (ar_sigma, noise, eta, rounds, depth) in [
        (0.05, 0.03, 0.1, 300usize, 4usize),
        (0.10, 0.05, 0.05, 600, 4),
        (0.10, 0.05, 0.1, 300, 6),
        (0.05, 0.05, 0.1, 300, 4),
        (0.02, 0.02, 0.1, 300, 4),
    ] {
        let spec = SynthSpec { amplitude: 1.0, ar_phi: 0.5, ar_sigma, noise_sigma: noise, ..Default::default() };
        let data = generate_synthetic(&spec).unwrap();
        let v = data.series.values();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let std = (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt();
        let scaled: Vec<f64> = v.iter().map(|x| x / std).collect();
        let series = TimeSeries::new(data.series.timestamps().to_vec(), scaled).unwrap();
        let cfg = PipelineConfig {
            skip_ga: true, skip_kalman: true,
            gbt: GbtConfig { learning_rate: eta, n_rounds: rounds, max_depth: depth, ..Default::default() },
            ..Default::default()
        };
        let r = run_pipeline(&series, &cfg).unwrap();
        println!(
            "sig={ar_sigma} noise={noise} eta={eta} rounds={rounds} depth={depth}: T {:.3}/{:.3} S {:.3}/{:.3} improve {:.2}",
            r.trend_metrics.rmse, r.trend_metrics.mape.unwrap_or(f64::NAN),
            r.periodic_metrics.rmse, r.periodic_metrics.mape.unwrap_or(f64::NAN),
            r.improvement_over_baseline);
    }
}
