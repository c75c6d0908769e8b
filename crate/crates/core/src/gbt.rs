//! Gradient-boosted regression trees over lagged component features,
//! predicting the periodic term.
//!
//! Second-order boosting with squared-error loss (g = yhat - y, h = 1):
//! trees are grown by exact greedy split enumeration over sorted feature
//! values, split gain
//!
//! ```text
//! gain = 1/2 * (GL^2/(HL+lambda) + GR^2/(HR+lambda) - (GL+GR)^2/(HL+HR+lambda)) - gamma
//! ```
//!
//! and leaf weight `-G/(H+lambda)`. Ties in gain break on the lowest
//! feature index, then the lowest threshold, so refits are bit-identical
//! regardless of how the per-node split search is parallelized.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::vmd::Decomposition;

/// Row-major feature matrix with per-row targets.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
    pub targets: Vec<f64>,
}

impl FeatureMatrix {
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n_cols..(row + 1) * self.n_cols]
    }
}

/// Lagged design: one row per time `t >= lag`, features
/// `[T, S, R, y]` blocks of `lag` columns each, oldest first — column
/// `j*lag + c` holds component `j` at time `t - lag + c`.
#[derive(Debug, Clone)]
pub struct LagMatrix {
    pub matrix: FeatureMatrix,
    pub lag: usize,
}

/// Builds the lag design from a decomposition and the recomposed series.
pub fn build_lag_matrix(decomp: &Decomposition, y: &TimeSeries, lag: usize) -> Result<LagMatrix> {
    let n = y.len();
    for (name, len) in [
        ("trend", decomp.trend.len()),
        ("periodic", decomp.periodic.len()),
        ("residual", decomp.residual.len()),
    ] {
        if len != n {
            return Err(Error::InvalidParameter(format!(
                "{name} component length {len} does not match series length {n}"
            )));
        }
    }
    if lag == 0 {
        return Err(Error::InvalidParameter("lag must be >= 1".into()));
    }
    if n <= lag {
        return Err(Error::SeriesTooShort { needed: lag + 1, got: n });
    }
    let comps = [
        decomp.trend.values(),
        decomp.periodic.values(),
        decomp.residual.values(),
        y.values(),
    ];
    let n_rows = n - lag;
    let n_cols = 4 * lag;
    let mut data = Vec::with_capacity(n_rows * n_cols);
    let mut targets = Vec::with_capacity(n_rows);
    for t in lag..n {
        for comp in comps {
            data.extend_from_slice(&comp[t - lag..t]);
        }
        targets.push(decomp.periodic.values()[t]);
    }
    for v in &data {
        if !v.is_finite() {
            return Err(Error::NonFinite { iteration: 0 });
        }
    }
    Ok(LagMatrix {
        matrix: FeatureMatrix {
            n_rows,
            n_cols,
            data,
            targets,
        },
        lag,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GbtConfig {
    pub max_depth: usize,
    pub learning_rate: f64,
    pub n_rounds: usize,
    /// L2 regularizer on leaf weights.
    pub lambda: f64,
    /// Minimum net split gain.
    pub gamma: f64,
    /// Stop after this many rounds without validation improvement; None
    /// trains all rounds on all rows.
    pub early_stopping_rounds: Option<usize>,
    /// Chronological tail fraction held out when early stopping is on.
    pub validation_fraction: f64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        Self {
            max_depth: 4,
            learning_rate: 0.1,
            n_rounds: 300,
            lambda: 1.0,
            gamma: 0.0,
            early_stopping_rounds: Some(30),
            validation_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Net gain at the time of the split, recomputed from the
        /// children's stored statistics.
        gain: f64,
        g_sum: f64,
        h_sum: f64,
    },
    Leaf {
        weight: f64,
        g_sum: f64,
        h_sum: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, features: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { weight, .. } => return *weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    idx = if features[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub trees: Vec<Tree>,
    pub learning_rate: f64,
    pub base_score: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub max_depth: usize,
    pub n_rounds: usize,
    pub n_features: usize,
    /// Lag of the design this model was trained on; zero for generic
    /// feature matrices.
    pub lag: usize,
}

/// Fit diagnostics kept out of the serialized model.
#[derive(Debug, Clone)]
pub struct GbtFitInfo {
    pub train_rmse_history: Vec<f64>,
    pub val_rmse_history: Vec<f64>,
    /// Ensemble predictions on the training rows at the kept round count.
    pub train_predictions: Vec<f64>,
    pub best_round: usize,
}

pub fn gbt_fit(m: &LagMatrix, cfg: &GbtConfig) -> Result<GbtModel> {
    let (mut model, _info) = gbt_fit_matrix(&m.matrix, cfg)?;
    model.lag = m.lag;
    Ok(model)
}

/// Core boosting loop on an explicit feature matrix.
pub fn gbt_fit_matrix(m: &FeatureMatrix, cfg: &GbtConfig) -> Result<(GbtModel, GbtFitInfo)> {
    if m.n_rows < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: m.n_rows });
    }
    if !(cfg.learning_rate > 0.0) || !(cfg.lambda >= 0.0) || !(cfg.gamma >= 0.0) {
        return Err(Error::InvalidParameter(
            "learning_rate must be positive; lambda and gamma non-negative".into(),
        ));
    }

    // Chronological tail validation slice when early stopping is active.
    let n_val = match cfg.early_stopping_rounds {
        Some(_) => ((m.n_rows as f64 * cfg.validation_fraction).ceil() as usize)
            .clamp(1, m.n_rows.saturating_sub(2)),
        None => 0,
    };
    let n_train = m.n_rows - n_val;
    let train_rows: Vec<usize> = (0..n_train).collect();

    // Presorted row order per feature over the training rows; ties break
    // on the row index so refits are deterministic.
    let sorted: Vec<Vec<u32>> = (0..m.n_cols)
        .into_par_iter()
        .map(|col| {
            let mut order: Vec<u32> = train_rows.iter().map(|&r| r as u32).collect();
            order.sort_by(|&a, &b| {
                m.get(a as usize, col)
                    .partial_cmp(&m.get(b as usize, col))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            order
        })
        .collect();

    let base_score = m.targets[..n_train].iter().sum::<f64>() / n_train as f64;
    let mut pred: Vec<f64> = vec![base_score; m.n_rows];
    let mut trees: Vec<Tree> = Vec::with_capacity(cfg.n_rounds);
    let mut train_rmse_history = Vec::with_capacity(cfg.n_rounds);
    let mut val_rmse_history = Vec::with_capacity(cfg.n_rounds);

    let rmse_over = |pred: &[f64], lo: usize, hi: usize| -> f64 {
        if lo == hi {
            return 0.0;
        }
        let acc: f64 = (lo..hi)
            .map(|i| {
                let e = pred[i] - m.targets[i];
                e * e
            })
            .sum();
        (acc / (hi - lo) as f64).sqrt()
    };

    let mut best_val = f64::INFINITY;
    let mut best_round = 0usize;

    for round in 0..cfg.n_rounds {
        let grads: Vec<f64> = (0..n_train).map(|i| pred[i] - m.targets[i]).collect();
        let tree = grow_tree(m, &sorted, &grads, n_train, cfg);
        for i in 0..m.n_rows {
            pred[i] += cfg.learning_rate * tree.predict(m.row(i));
        }
        trees.push(tree);
        train_rmse_history.push(rmse_over(&pred, 0, n_train));

        if let Some(patience) = cfg.early_stopping_rounds {
            let val = rmse_over(&pred, n_train, m.n_rows);
            val_rmse_history.push(val);
            if val < best_val {
                best_val = val;
                best_round = round;
            } else if round - best_round >= patience {
                break;
            }
        } else {
            best_round = round;
        }
    }

    trees.truncate(best_round + 1);
    train_rmse_history.truncate(best_round + 1);
    val_rmse_history.truncate(best_round + 1);

    let model = GbtModel {
        n_rounds: trees.len(),
        trees,
        learning_rate: cfg.learning_rate,
        base_score,
        lambda: cfg.lambda,
        gamma: cfg.gamma,
        max_depth: cfg.max_depth,
        n_features: m.n_cols,
        lag: 0,
    };
    let train_predictions: Vec<f64> = (0..m.n_rows).map(|i| gbt_predict_unchecked(&model, m.row(i))).collect();
    Ok((
        model,
        GbtFitInfo {
            train_rmse_history,
            val_rmse_history,
            train_predictions,
            best_round,
        },
    ))
}

struct SplitCandidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn grow_tree(
    m: &FeatureMatrix,
    sorted: &[Vec<u32>],
    grads: &[f64],
    n_train: usize,
    cfg: &GbtConfig,
) -> Tree {
    let mut nodes: Vec<Node> = Vec::new();
    let mut in_node: Vec<bool> = vec![true; n_train];
    // Stack of (node slot, member rows, depth).
    let root_rows: Vec<u32> = (0..n_train as u32).collect();
    nodes.push(Node::Leaf { weight: 0.0, g_sum: 0.0, h_sum: 0.0 });
    let mut stack = vec![(0usize, root_rows, 0usize)];

    while let Some((slot, rows, depth)) = stack.pop() {
        let g_sum: f64 = rows.iter().map(|&r| grads[r as usize]).sum();
        let h_sum = rows.len() as f64;

        let make_leaf = |g_sum: f64, h_sum: f64| Node::Leaf {
            weight: -g_sum / (h_sum + cfg.lambda),
            g_sum,
            h_sum,
        };

        if depth >= cfg.max_depth || rows.len() < 2 {
            nodes[slot] = make_leaf(g_sum, h_sum);
            continue;
        }

        for &r in &rows {
            in_node[r as usize] = true;
        }

        let parent_score = g_sum * g_sum / (h_sum + cfg.lambda);
        let best = (0..m.n_cols)
            .into_par_iter()
            .map(|col| {
                let mut best: Option<SplitCandidate> = None;
                let mut gl = 0.0;
                let mut hl = 0.0;
                let mut prev_value: Option<f64> = None;
                for &r in &sorted[col] {
                    let r = r as usize;
                    if !in_node[r] {
                        continue;
                    }
                    let value = m.get(r, col);
                    if let Some(pv) = prev_value {
                        if value > pv && hl > 0.0 && hl < h_sum {
                            let gr = g_sum - gl;
                            let hr = h_sum - hl;
                            let gain = 0.5
                                * (gl * gl / (hl + cfg.lambda) + gr * gr / (hr + cfg.lambda)
                                    - parent_score)
                                - cfg.gamma;
                            let threshold = 0.5 * (pv + value);
                            let better = match &best {
                                None => gain > 0.0,
                                Some(b) => {
                                    gain > b.gain || (gain == b.gain && threshold < b.threshold)
                                }
                            };
                            if better && gain > 0.0 {
                                best = Some(SplitCandidate { gain, feature: col, threshold });
                            }
                        }
                    }
                    gl += grads[r];
                    hl += 1.0;
                    prev_value = Some(value);
                }
                best
            })
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (None, b) => b,
                    (a, None) => a,
                    (Some(a), Some(b)) => {
                        // Deterministic preference: higher gain, then lower
                        // feature index, then lower threshold.
                        if b.gain > a.gain
                            || (b.gain == a.gain
                                && (b.feature < a.feature
                                    || (b.feature == a.feature && b.threshold < a.threshold)))
                        {
                            Some(b)
                        } else {
                            Some(a)
                        }
                    }
                },
            );

        for &r in &rows {
            in_node[r as usize] = false;
        }

        match best {
            None => {
                nodes[slot] = make_leaf(g_sum, h_sum);
            }
            Some(cand) => {
                let (left_rows, right_rows): (Vec<u32>, Vec<u32>) = rows
                    .iter()
                    .partition(|&&r| m.get(r as usize, cand.feature) < cand.threshold);
                // Children statistics in canonical (row-order) summation;
                // the stored gain is recomputed from exactly these sums so
                // the post-fit audit can reproduce it bit for bit.
                let gl: f64 = left_rows.iter().map(|&r| grads[r as usize]).sum();
                let hl = left_rows.len() as f64;
                let gr: f64 = right_rows.iter().map(|&r| grads[r as usize]).sum();
                let hr = right_rows.len() as f64;
                let stored_gain = split_gain(gl, hl, gr, hr, cfg.lambda, cfg.gamma);

                let left_slot = nodes.len();
                nodes.push(Node::Leaf { weight: 0.0, g_sum: 0.0, h_sum: 0.0 });
                let right_slot = nodes.len();
                nodes.push(Node::Leaf { weight: 0.0, g_sum: 0.0, h_sum: 0.0 });
                nodes[slot] = Node::Split {
                    feature: cand.feature,
                    threshold: cand.threshold,
                    left: left_slot,
                    right: right_slot,
                    gain: stored_gain,
                    g_sum,
                    h_sum,
                };
                stack.push((right_slot, right_rows, depth + 1));
                stack.push((left_slot, left_rows, depth + 1));
            }
        }
    }
    Tree { nodes }
}

/// The split-gain formula shared by training and the post-fit audit.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, gamma: f64) -> f64 {
    let parent = (gl + gr) * (gl + gr) / (hl + hr + lambda);
    0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent) - gamma
}

fn gbt_predict_unchecked(model: &GbtModel, features: &[f64]) -> f64 {
    let mut acc = model.base_score;
    for tree in &model.trees {
        acc += model.learning_rate * tree.predict(features);
    }
    acc
}

/// Ensemble prediction: `base_score + eta * sum(tree outputs)`.
pub fn gbt_predict(model: &GbtModel, features: &[f64]) -> Result<f64> {
    if features.len() != model.n_features {
        return Err(Error::LengthMismatch {
            left: features.len(),
            right: model.n_features,
        });
    }
    Ok(gbt_predict_unchecked(model, features))
}

/// Verifies every stored split: the recorded gain must equal the formula
/// applied to the children's stored (G, H) exactly, and must clear zero
/// net of gamma.
pub fn audit_split_gains(model: &GbtModel) -> Result<()> {
    for (ti, tree) in model.trees.iter().enumerate() {
        for (ni, node) in tree.nodes.iter().enumerate() {
            if let Node::Split { left, right, gain, .. } = node {
                let stats = |idx: usize| match &tree.nodes[idx] {
                    Node::Split { g_sum, h_sum, .. } | Node::Leaf { g_sum, h_sum, .. } => {
                        (*g_sum, *h_sum)
                    }
                };
                let (gl, hl) = stats(*left);
                let (gr, hr) = stats(*right);
                let expect = split_gain(gl, hl, gr, hr, model.lambda, model.gamma);
                if expect.to_bits() != gain.to_bits() {
                    return Err(Error::InvalidParameter(format!(
                        "tree {ti} node {ni}: stored gain {gain} != recomputed {expect}"
                    )));
                }
                if !(*gain > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "tree {ti} node {ni}: split kept with non-positive net gain {gain}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Recursive multi-step forecast of the periodic term. Future trend and
/// residual values come from their own models; predicted S values and the
/// recomposed total are fed back into the lag buffers.
pub fn forecast_periodic(
    model: &GbtModel,
    t_hist: &[f64],
    s_hist: &[f64],
    r_hist: &[f64],
    y_hist: &[f64],
    t_future: &[f64],
    r_future: &[f64],
    horizon: usize,
) -> Result<Vec<f64>> {
    let lag = model.lag;
    if lag == 0 {
        return Err(Error::InvalidParameter(
            "model was not trained on a lag design; cannot forecast".into(),
        ));
    }
    for hist in [t_hist, s_hist, r_hist, y_hist] {
        if hist.len() < lag {
            return Err(Error::SeriesTooShort { needed: lag, got: hist.len() });
        }
    }
    if t_future.len() < horizon || r_future.len() < horizon {
        return Err(Error::SeriesTooShort {
            needed: horizon,
            got: t_future.len().min(r_future.len()),
        });
    }

    let mut t_buf: Vec<f64> = t_hist[t_hist.len() - lag..].to_vec();
    let mut s_buf: Vec<f64> = s_hist[s_hist.len() - lag..].to_vec();
    let mut r_buf: Vec<f64> = r_hist[r_hist.len() - lag..].to_vec();
    let mut y_buf: Vec<f64> = y_hist[y_hist.len() - lag..].to_vec();

    let mut features = vec![0.0; 4 * lag];
    let mut out = Vec::with_capacity(horizon);
    for h in 0..horizon {
        features[..lag].copy_from_slice(&t_buf);
        features[lag..2 * lag].copy_from_slice(&s_buf);
        features[2 * lag..3 * lag].copy_from_slice(&r_buf);
        features[3 * lag..].copy_from_slice(&y_buf);
        let s_hat = gbt_predict(model, &features)?;
        let t_next = t_future[h];
        let r_next = r_future[h];
        push_rotate(&mut t_buf, t_next);
        push_rotate(&mut s_buf, s_hat);
        push_rotate(&mut r_buf, r_next);
        push_rotate(&mut y_buf, t_next + s_hat + r_next);
        out.push(s_hat);
    }
    Ok(out)
}

fn push_rotate(buf: &mut [f64], value: f64) {
    buf.rotate_left(1);
    *buf.last_mut().unwrap() = value;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rmse;
    use crate::vmd::Decomposition;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn decomposition_from(t: Vec<f64>, s: Vec<f64>, r: Vec<f64>) -> (Decomposition, TimeSeries) {
        let y: Vec<f64> = t
            .iter()
            .zip(&s)
            .zip(&r)
            .map(|((a, b), c)| a + b + c)
            .collect();
        let d = Decomposition {
            trend: TimeSeries::from_values(t).unwrap(),
            periodic: TimeSeries::from_values(s).unwrap(),
            residual: TimeSeries::from_values(r).unwrap(),
            center_freqs: vec![0.0; 3],
            recon_mse: 0.0,
            iterations: 0,
            converged: true,
        };
        let y = TimeSeries::from_values(y).unwrap();
        (d, y)
    }

    fn matrix_from(features: Vec<Vec<f64>>, targets: Vec<f64>) -> FeatureMatrix {
        let n_rows = features.len();
        let n_cols = features[0].len();
        FeatureMatrix {
            n_rows,
            n_cols,
            data: features.into_iter().flatten().collect(),
            targets,
        }
    }

    #[test]
    fn lag_matrix_counts_and_ordering() {
        let n = 50;
        let ramp: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let (d, y) = decomposition_from(ramp.clone(), vec![0.0; n], vec![0.0; n]);
        let lm = build_lag_matrix(&d, &y, 48).unwrap();
        assert_eq!(lm.matrix.n_rows, 2);
        assert_eq!(lm.matrix.n_cols, 192);
        // Row for t=48: column 0 is T_0 (the oldest trend lag).
        assert_eq!(lm.matrix.get(0, 0), 0.0);
        assert_eq!(lm.matrix.get(0, 47), 47.0);
        assert_eq!(lm.matrix.get(1, 0), 1.0);
        // Target is S_t.
        assert_eq!(lm.matrix.targets, vec![0.0, 0.0]);
    }

    #[test]
    fn lag_matrix_constant_series() {
        let n = 60;
        let (d, y) = decomposition_from(vec![2.0; n], vec![2.0; n], vec![2.0; n]);
        let lm = build_lag_matrix(&d, &y, 10).unwrap();
        for row in 0..lm.matrix.n_rows {
            for col in 0..30 {
                assert_eq!(lm.matrix.get(row, col), 2.0);
            }
            for col in 30..40 {
                assert_eq!(lm.matrix.get(row, col), 6.0); // y block
            }
        }
    }

    #[test]
    fn lag_matrix_errors() {
        let (d, y) = decomposition_from(vec![0.0; 10], vec![0.0; 10], vec![0.0; 10]);
        assert!(build_lag_matrix(&d, &y, 10).is_err());
        assert!(build_lag_matrix(&d, &y, 0).is_err());
    }

    #[test]
    fn stump_splits_at_sign_boundary() {
        let m = matrix_from(
            vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]],
            vec![0.0, 0.0, 1.0, 1.0],
        );
        let cfg = GbtConfig {
            max_depth: 1,
            learning_rate: 1.0,
            n_rounds: 1,
            lambda: 0.0,
            gamma: 0.0,
            early_stopping_rounds: None,
            ..Default::default()
        };
        let (model, _) = gbt_fit_matrix(&m, &cfg).unwrap();
        assert_eq!(model.trees.len(), 1);
        match &model.trees[0].nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.0);
            }
            other => panic!("expected root split, got {other:?}"),
        }
        let lo = gbt_predict(&model, &[-3.0]).unwrap();
        let hi = gbt_predict(&model, &[3.0]).unwrap();
        assert!((lo - 0.0).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_ensemble_predicts_base_score() {
        let m = matrix_from(vec![vec![1.0], vec![2.0], vec![3.0]], vec![4.0, 5.0, 9.0]);
        let cfg = GbtConfig {
            n_rounds: 0,
            early_stopping_rounds: None,
            ..Default::default()
        };
        let (model, _) = gbt_fit_matrix(&m, &cfg).unwrap();
        let p = gbt_predict(&model, &[10.0]).unwrap();
        assert!((p - 6.0).abs() < 1e-12);
    }

    #[test]
    fn memorizes_random_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let rows = 200;
        let cols = 192;
        let features: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random::<f64>()).collect())
            .collect();
        let targets: Vec<f64> = (0..rows).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let m = matrix_from(features, targets);
        let cfg = GbtConfig {
            max_depth: 6,
            learning_rate: 0.3,
            n_rounds: 400,
            lambda: 1.0,
            gamma: 0.0,
            early_stopping_rounds: None,
            ..Default::default()
        };
        let (_, info) = gbt_fit_matrix(&m, &cfg).unwrap();
        let train_rmse = rmse(&info.train_predictions, &m.targets).unwrap();
        assert!(train_rmse < 1e-3, "train rmse {train_rmse}");

        // Monotone training loss.
        for w in info.train_rmse_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0]));
        }
    }

    #[test]
    fn unused_features_do_not_affect_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows = 80;
        // Only feature 0 carries signal; feature 1 is constant so no tree
        // can split on it.
        let features: Vec<Vec<f64>> = (0..rows)
            .map(|_| vec![rng.random::<f64>(), 7.0])
            .collect();
        let targets: Vec<f64> = features.iter().map(|f| (f[0] * 10.0).sin()).collect();
        let m = matrix_from(features, targets);
        let cfg = GbtConfig {
            n_rounds: 40,
            early_stopping_rounds: None,
            ..Default::default()
        };
        let (model, _) = gbt_fit_matrix(&m, &cfg).unwrap();
        for tree in &model.trees {
            for node in &tree.nodes {
                if let Node::Split { feature, .. } = node {
                    assert_eq!(*feature, 0);
                }
            }
        }
        let a = gbt_predict(&model, &[0.4, 7.0]).unwrap();
        let b = gbt_predict(&model, &[0.4, -12345.0]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn train_predictions_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows = 120;
        let features: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..6).map(|_| rng.random::<f64>()).collect())
            .collect();
        let targets: Vec<f64> = features.iter().map(|f| f[0] + 2.0 * f[3]).collect();
        let m = matrix_from(features, targets);
        let (model, info) = gbt_fit_matrix(
            &m,
            &GbtConfig {
                n_rounds: 50,
                early_stopping_rounds: None,
                ..Default::default()
            },
        )
        .unwrap();
        for i in 0..rows {
            let p = gbt_predict(&model, m.row(i)).unwrap();
            assert!((p - info.train_predictions[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn refits_are_bit_identical_and_audited() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows = 150;
        let features: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..8).map(|_| rng.random::<f64>()).collect())
            .collect();
        let targets: Vec<f64> = features.iter().map(|f| f.iter().sum::<f64>()).collect();
        let m = matrix_from(features, targets);
        let cfg = GbtConfig {
            n_rounds: 30,
            gamma: 0.01,
            early_stopping_rounds: None,
            ..Default::default()
        };
        let (m1, _) = gbt_fit_matrix(&m, &cfg).unwrap();
        let (m2, _) = gbt_fit_matrix(&m, &cfg).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(
            serde_json::to_string(&m1).unwrap(),
            serde_json::to_string(&m2).unwrap()
        );
        audit_split_gains(&m1).unwrap();
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = matrix_from(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]], vec![1.0, 2.0, 3.0]);
        let (model, _) = gbt_fit_matrix(
            &m,
            &GbtConfig {
                n_rounds: 2,
                early_stopping_rounds: None,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(gbt_predict(&model, &[1.0]).is_err());
    }

    #[test]
    fn forecast_horizon_edges() {
        let n = 200;
        let s: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / 24.0).sin())
            .collect();
        let (d, y) = decomposition_from(vec![0.0; n], s.clone(), vec![0.0; n]);
        let lm = build_lag_matrix(&d, &y, 48).unwrap();
        let model = gbt_fit(
            &lm,
            &GbtConfig {
                n_rounds: 80,
                early_stopping_rounds: None,
                ..Default::default()
            },
        )
        .unwrap();

        let empty = forecast_periodic(&model, &s, &s, &s, &s, &[], &[], 0).unwrap();
        assert!(empty.is_empty());

        // Horizon 1 equals a direct prediction from the last true lags.
        let zeros = vec![0.0; 1];
        let t_hist = vec![0.0; n];
        let one = forecast_periodic(&model, &t_hist, &s, &t_hist, &s, &zeros, &zeros, 1).unwrap();
        let mut features = Vec::with_capacity(192);
        features.extend_from_slice(&t_hist[n - 48..]);
        features.extend_from_slice(&s[n - 48..]);
        features.extend_from_slice(&t_hist[n - 48..]);
        features.extend_from_slice(&s[n - 48..]);
        let direct = gbt_predict(&model, &features).unwrap();
        assert_eq!(one[0].to_bits(), direct.to_bits());
    }

    #[test]
    fn forecasts_pure_sinusoid() {
        let n = 400;
        let period = 24.0;
        let s: Vec<f64> = (0..n + 100)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / period).sin())
            .collect();
        let (d, y) = decomposition_from(vec![0.0; n], s[..n].to_vec(), vec![0.0; n]);
        let lm = build_lag_matrix(&d, &y, 48).unwrap();
        let model = gbt_fit(
            &lm,
            &GbtConfig {
                n_rounds: 200,
                learning_rate: 0.3,
                early_stopping_rounds: None,
                ..Default::default()
            },
        )
        .unwrap();
        let zeros = vec![0.0; 100];
        let t_hist = vec![0.0; n];
        let pred = forecast_periodic(
            &model,
            &t_hist,
            &s[..n],
            &t_hist,
            &s[..n],
            &zeros,
            &zeros,
            100,
        )
        .unwrap();
        let truth = &s[n..n + 100];
        let err = rmse(&pred, truth).unwrap();
        assert!(err < 0.05, "100-step rmse {err}");
    }
}
