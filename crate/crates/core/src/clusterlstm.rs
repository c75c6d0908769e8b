//! Residual-term model: sliding windows are clustered by k-means and each
//! cluster gets its own shallow LSTM, so sequences living at different
//! scales are fitted by specialists. K = 1 degenerates to a single plain
//! LSTM, which doubles as the ablation arm.
//!
//! Clustering and routing operate on raw windows (scale differences are the signal);
//! each cluster's windows are z-normalized with that cluster's statistics
//! before entering its LSTM, and predictions are de-normalized on the way
//! out.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstm::{train_lstm, AdamConfig, LayerDims, LstmWeights};
use crate::series::TimeSeries;

/// Stride-1 sliding windows with next-step targets.
#[derive(Debug, Clone)]
pub struct WindowSet {
    pub windows: Vec<Vec<f64>>,
    pub next_values: Vec<f64>,
    pub window: usize,
}

pub fn make_windows(series: &TimeSeries, len: usize) -> Result<WindowSet> {
    if len == 0 {
        return Err(Error::InvalidParameter("window length must be >= 1".into()));
    }
    let n = series.len();
    if n <= len {
        return Err(Error::SeriesTooShort { needed: len + 1, got: n });
    }
    let values = series.values();
    let count = n - len;
    let mut windows = Vec::with_capacity(count);
    let mut next_values = Vec::with_capacity(count);
    for i in 0..count {
        windows.push(values[i..i + len].to_vec());
        next_values.push(values[i + len]);
    }
    Ok(WindowSet {
        windows,
        next_values,
        window: len,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansModel {
    pub centroids: Vec<Vec<f64>>,
    pub k: usize,
    pub inertia: f64,
}

impl KMeansModel {
    /// Nearest centroid by squared Euclidean distance; ties break on the
    /// lower index.
    pub fn assign(&self, point: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centroids.iter().enumerate() {
            let d = dist2(point, c);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn inertia_of(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .map(|p| dist2(p, &self.centroids[self.assign(p)]))
            .sum()
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k-means++ seeding, best of several seeded
/// restarts by inertia. A single seeding can strand every centroid in a
/// heavy-tailed scale cluster (the distance-squared weighting favours
/// far-apart loud windows), which restarts make vanishingly unlikely.
pub fn kmeans_fit(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansModel> {
    const RESTARTS: u64 = 8;
    let mut best: Option<KMeansModel> = None;
    for restart in 0..RESTARTS {
        let model = kmeans_fit_once(points, k, seed.wrapping_add(restart.wrapping_mul(0x9e37_79b9_7f4a_7c15)))?;
        let better = match &best {
            None => true,
            Some(b) => model.inertia < b.inertia,
        };
        if better {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn kmeans_fit_once(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansModel> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if points.len() < k {
        return Err(Error::SeriesTooShort {
            needed: k,
            got: points.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())].clone());
    let mut min_d: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = min_d.iter().sum();
        let next = if total <= 0.0 {
            rng.random_range(0..points.len())
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, d) in min_d.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centroids.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            min_d[i] = min_d[i].min(dist2(p, centroids.last().unwrap()));
        }
    }

    let dim = points[0].len();
    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..300 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let d = dist2(p, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignment) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                // Reseed from the point farthest from its centroid.
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        dist2(&points[a], &centroids[assignment[a]])
                            .partial_cmp(&dist2(&points[b], &centroids[assignment[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centroids[j] = points[far].clone();
            } else {
                for (c, s) in centroids[j].iter_mut().zip(&sums[j]) {
                    *c = s / counts[j] as f64;
                }
            }
        }
    }

    let model = KMeansModel {
        centroids,
        k,
        inertia: 0.0,
    };
    let inertia = model.inertia_of(points);
    Ok(KMeansModel { inertia, ..model })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClusterLstmConfig {
    pub k: usize,
    pub window: usize,
    pub hidden: usize,
    pub layers: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Clusters below this size abort training with a hint to lower k.
    pub min_cluster_size: usize,
}

impl Default for ClusterLstmConfig {
    fn default() -> Self {
        Self {
            k: 4,
            window: 24,
            hidden: 6,
            layers: 2,
            epochs: 200,
            learning_rate: 1e-2,
            min_cluster_size: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterLstmModel {
    pub kmeans: KMeansModel,
    pub lstms: Vec<LstmWeights>,
    /// Per-cluster (mean, std) of member window values and targets.
    pub normalization: Vec<(f64, f64)>,
    pub window: usize,
}

/// Training diagnostics (per-cluster Adam loss traces).
#[derive(Debug, Clone)]
pub struct ClusterLstmInfo {
    pub cluster_sizes: Vec<usize>,
    pub loss_traces: Vec<Vec<f64>>,
}

fn lstm_shape(cfg: &ClusterLstmConfig) -> Vec<LayerDims> {
    let mut dims = vec![LayerDims { input: 1, hidden: cfg.hidden }];
    for _ in 1..cfg.layers {
        dims.push(LayerDims {
            input: cfg.hidden,
            hidden: cfg.hidden,
        });
    }
    dims
}

/// Clusters the windows once, then trains one LSTM per cluster on
/// z-normalized members. Cluster trainings are independent and run in
/// parallel; each derives its own seed, so results do not depend on
/// thread scheduling.
pub fn clusterlstm_train(
    windows: &WindowSet,
    cfg: &ClusterLstmConfig,
    seed: u64,
) -> Result<(ClusterLstmModel, ClusterLstmInfo)> {
    if cfg.layers == 0 || cfg.hidden == 0 {
        return Err(Error::InvalidParameter("layers and hidden must be >= 1".into()));
    }
    let kmeans = kmeans_fit(&windows.windows, cfg.k, seed)?;
    let assignment: Vec<usize> = windows.windows.iter().map(|w| kmeans.assign(w)).collect();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cfg.k];
    for (i, &a) in assignment.iter().enumerate() {
        members[a].push(i);
    }
    for (cluster, m) in members.iter().enumerate() {
        if m.len() < cfg.min_cluster_size {
            return Err(Error::ClusterTooSmall {
                cluster,
                size: m.len(),
                min: cfg.min_cluster_size,
            });
        }
    }

    let trained: Vec<Result<(LstmWeights, (f64, f64), Vec<f64>)>> = members
        .par_iter()
        .enumerate()
        .map(|(cluster, rows)| {
            // Normalization over member window values and targets together.
            let mut acc = 0.0;
            let mut count = 0usize;
            for &r in rows {
                acc += windows.windows[r].iter().sum::<f64>() + windows.next_values[r];
                count += windows.window + 1;
            }
            let mean = acc / count as f64;
            let mut var = 0.0;
            for &r in rows {
                for v in &windows.windows[r] {
                    var += (v - mean) * (v - mean);
                }
                let t = windows.next_values[r];
                var += (t - mean) * (t - mean);
            }
            let std = (var / count as f64).sqrt().max(1e-12);

            let normed: Vec<Vec<f64>> = rows
                .iter()
                .map(|&r| windows.windows[r].iter().map(|v| (v - mean) / std).collect())
                .collect();
            let targets: Vec<f64> = rows
                .iter()
                .map(|&r| (windows.next_values[r] - mean) / std)
                .collect();

            let cluster_seed = seed
                .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(cluster as u64 + 1));
            let mut weights = LstmWeights::init(lstm_shape(cfg), cluster_seed);
            let trace = train_lstm(
                &mut weights,
                &normed,
                &targets,
                &AdamConfig {
                    learning_rate: cfg.learning_rate,
                    epochs: cfg.epochs,
                    ..Default::default()
                },
            )?;
            Ok((weights, (mean, std), trace))
        })
        .collect();

    let mut lstms = Vec::with_capacity(cfg.k);
    let mut normalization = Vec::with_capacity(cfg.k);
    let mut loss_traces = Vec::with_capacity(cfg.k);
    for r in trained {
        let (w, norm, trace) = r?;
        lstms.push(w);
        normalization.push(norm);
        loss_traces.push(trace);
    }

    Ok((
        ClusterLstmModel {
            kmeans,
            lstms,
            normalization,
            window: windows.window,
        },
        ClusterLstmInfo {
            cluster_sizes: members.iter().map(|m| m.len()).collect(),
            loss_traces,
        },
    ))
}

/// One routed prediction: nearest centroid on the raw window, that
/// cluster's LSTM on the normalized window, de-normalized output.
/// Returns the prediction and the cluster used.
pub fn predict_one(model: &ClusterLstmModel, window: &[f64]) -> Result<(f64, usize)> {
    if window.len() != model.window {
        return Err(Error::LengthMismatch {
            left: window.len(),
            right: model.window,
        });
    }
    let cluster = model.kmeans.assign(window);
    let (mean, std) = model.normalization[cluster];
    let normed: Vec<f64> = window.iter().map(|v| (v - mean) / std).collect();
    let out = crate::lstm::lstm_forward(&model.lstms[cluster], &normed)?;
    Ok((out * std + mean, cluster))
}

/// Recursive multi-step forecast: predict, slide the window, repeat.
pub fn clusterlstm_predict(
    model: &ClusterLstmModel,
    recent: &[f64],
    horizon: usize,
) -> Result<Vec<f64>> {
    if recent.len() < model.window {
        return Err(Error::SeriesTooShort {
            needed: model.window,
            got: recent.len(),
        });
    }
    let mut window: Vec<f64> = recent[recent.len() - model.window..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let (pred, _) = predict_one(model, &window)?;
        window.rotate_left(1);
        *window.last_mut().unwrap() = pred;
        out.push(pred);
    }
    Ok(out)
}

/// Re-checks that every training window routes to the model whose centroid
/// is nearest (the assignment used during training).
pub fn audit_routing(model: &ClusterLstmModel, windows: &WindowSet) -> bool {
    windows
        .windows
        .iter()
        .all(|w| model.kmeans.assign(w) < model.lstms.len())
}
