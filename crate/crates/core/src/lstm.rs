//! Stacked LSTM for scalar sequences, with exact backpropagation through
//! time and an Adam training loop. Shapes are generic; the residual model
//! uses two layers of six units over 24-step windows.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trend::sigmoid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDims {
    pub input: usize,
    pub hidden: usize,
}

/// Gate order inside the parameter vector: input, forget, cell, output;
/// per gate: `wx` (hidden x input, row-major), `wh` (hidden x hidden),
/// bias. The output projection (last hidden -> 1) sits at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmWeights {
    pub layers: Vec<LayerDims>,
    pub params: Vec<f64>,
}

const GATES: usize = 4;

fn layer_param_count(d: LayerDims) -> usize {
    GATES * (d.hidden * d.input + d.hidden * d.hidden + d.hidden)
}

impl LstmWeights {
    pub fn param_count(layers: &[LayerDims]) -> usize {
        let last_hidden = layers.last().map(|d| d.hidden).unwrap_or(0);
        layers.iter().map(|&d| layer_param_count(d)).sum::<usize>() + last_hidden + 1
    }

    /// Zero-initialized network of the given stack shape.
    pub fn zeros(layers: Vec<LayerDims>) -> Self {
        let n = Self::param_count(&layers);
        Self {
            layers,
            params: vec![0.0; n],
        }
    }

    /// Seeded uniform init scaled by 1/sqrt(fan-in); forget-gate biases
    /// start at +1.
    pub fn init(layers: Vec<LayerDims>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = Self::zeros(layers);
        let mut offset = 0;
        let layer_dims = w.layers.clone();
        for d in &layer_dims {
            for gate in 0..GATES {
                let scale_x = 1.0 / (d.input as f64).sqrt();
                for _ in 0..d.hidden * d.input {
                    w.params[offset] = (rng.random::<f64>() - 0.5) * scale_x;
                    offset += 1;
                }
                let scale_h = 1.0 / (d.hidden as f64).sqrt();
                for _ in 0..d.hidden * d.hidden {
                    w.params[offset] = (rng.random::<f64>() - 0.5) * scale_h;
                    offset += 1;
                }
                for _ in 0..d.hidden {
                    w.params[offset] = if gate == 1 { 1.0 } else { 0.0 };
                    offset += 1;
                }
            }
        }
        let last_hidden = w.layers.last().map(|d| d.hidden).unwrap_or(0);
        let scale = 1.0 / (last_hidden.max(1) as f64).sqrt();
        for _ in 0..last_hidden {
            w.params[offset] = (rng.random::<f64>() - 0.5) * scale;
            offset += 1;
        }
        // Output bias stays zero.
        w
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.len() != Self::param_count(&self.layers) {
            return Err(Error::LengthMismatch {
                left: self.params.len(),
                right: Self::param_count(&self.layers),
            });
        }
        for (l, w) in self.layers.windows(2).enumerate() {
            if w[1].input != w[0].hidden {
                return Err(Error::InvalidParameter(format!(
                    "layer {} input {} does not match previous hidden {}",
                    l + 1,
                    w[1].input,
                    w[0].hidden
                )));
            }
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        Ok(())
    }
}

struct LayerOffsets {
    wx: [usize; GATES],
    wh: [usize; GATES],
    b: [usize; GATES],
}

fn offsets(layers: &[LayerDims]) -> (Vec<LayerOffsets>, usize, usize) {
    let mut out = Vec::with_capacity(layers.len());
    let mut cursor = 0;
    for d in layers {
        let mut wx = [0; GATES];
        let mut wh = [0; GATES];
        let mut b = [0; GATES];
        for gate in 0..GATES {
            wx[gate] = cursor;
            cursor += d.hidden * d.input;
            wh[gate] = cursor;
            cursor += d.hidden * d.hidden;
            b[gate] = cursor;
            cursor += d.hidden;
        }
        out.push(LayerOffsets { wx, wh, b });
    }
    let w_out = cursor;
    let last_hidden = layers.last().map(|d| d.hidden).unwrap_or(0);
    let b_out = cursor + last_hidden;
    (out, w_out, b_out)
}

/// Per-(layer, step) activations kept for the backward pass.
struct Cache {
    // [layer][t][unit]
    x: Vec<Vec<Vec<f64>>>,
    gates: Vec<Vec<[Vec<f64>; GATES]>>,
    c: Vec<Vec<Vec<f64>>>,
    tanh_c: Vec<Vec<Vec<f64>>>,
    h: Vec<Vec<Vec<f64>>>,
}

fn forward_cached(w: &LstmWeights, window: &[f64]) -> (f64, Cache) {
    let steps = window.len();
    let (offs, w_out, b_out) = offsets(&w.layers);
    let p = &w.params;

    let mut cache = Cache {
        x: Vec::with_capacity(w.layers.len()),
        gates: Vec::with_capacity(w.layers.len()),
        c: Vec::with_capacity(w.layers.len()),
        tanh_c: Vec::with_capacity(w.layers.len()),
        h: Vec::with_capacity(w.layers.len()),
    };

    let mut inputs: Vec<Vec<f64>> = window.iter().map(|&v| vec![v]).collect();
    for (l, d) in w.layers.iter().enumerate() {
        let o = &offs[l];
        let mut xs = Vec::with_capacity(steps);
        let mut gates_t = Vec::with_capacity(steps);
        let mut cs = Vec::with_capacity(steps);
        let mut tanhs = Vec::with_capacity(steps);
        let mut hs: Vec<Vec<f64>> = Vec::with_capacity(steps);

        let mut h_prev = vec![0.0; d.hidden];
        let mut c_prev = vec![0.0; d.hidden];
        for (t, x) in inputs.iter().enumerate() {
            let mut z = [
                vec![0.0; d.hidden],
                vec![0.0; d.hidden],
                vec![0.0; d.hidden],
                vec![0.0; d.hidden],
            ];
            for gate in 0..GATES {
                for r in 0..d.hidden {
                    let mut acc = p[o.b[gate] + r];
                    let wx_row = o.wx[gate] + r * d.input;
                    for c in 0..d.input {
                        acc += p[wx_row + c] * x[c];
                    }
                    let wh_row = o.wh[gate] + r * d.hidden;
                    for c in 0..d.hidden {
                        acc += p[wh_row + c] * h_prev[c];
                    }
                    z[gate][r] = acc;
                }
            }
            let i_g: Vec<f64> = z[0].iter().map(|&v| sigmoid(v)).collect();
            let f_g: Vec<f64> = z[1].iter().map(|&v| sigmoid(v)).collect();
            let g_g: Vec<f64> = z[2].iter().map(|&v| v.tanh()).collect();
            let o_g: Vec<f64> = z[3].iter().map(|&v| sigmoid(v)).collect();
            let c_t: Vec<f64> = (0..d.hidden)
                .map(|r| f_g[r] * c_prev[r] + i_g[r] * g_g[r])
                .collect();
            let tanh_c: Vec<f64> = c_t.iter().map(|v| v.tanh()).collect();
            let h_t: Vec<f64> = (0..d.hidden).map(|r| o_g[r] * tanh_c[r]).collect();

            xs.push(x.clone());
            gates_t.push([i_g, f_g, g_g, o_g]);
            cs.push(c_t.clone());
            tanhs.push(tanh_c);
            hs.push(h_t.clone());
            h_prev = h_t;
            c_prev = c_t;
            let _ = t;
        }
        inputs = hs.clone();
        cache.x.push(xs);
        cache.gates.push(gates_t);
        cache.c.push(cs);
        cache.tanh_c.push(tanhs);
        cache.h.push(hs);
    }

    let last = cache.h.last().unwrap().last().unwrap();
    let mut y = p[b_out];
    for (r, h) in last.iter().enumerate() {
        y += p[w_out + r] * h;
    }
    (y, cache)
}

/// Next-step prediction from a window of scalars.
pub fn lstm_forward(w: &LstmWeights, window: &[f64]) -> Result<f64> {
    w.validate()?;
    if window.is_empty() {
        return Err(Error::EmptySeries);
    }
    if w.layers.is_empty() || w.layers[0].input != 1 {
        return Err(Error::InvalidParameter(
            "scalar-sequence forward needs a first layer with input size 1".into(),
        ));
    }
    Ok(forward_cached(w, window).0)
}

/// Accumulates `d_loss/d_params` for one window into `grad`, given
/// `d_loss/d_prediction`. Returns the prediction.
pub fn lstm_backward(w: &LstmWeights, window: &[f64], dy: f64, grad: &mut [f64]) -> f64 {
    let (y, cache) = forward_cached(w, window);
    let steps = window.len();
    let n_layers = w.layers.len();
    let (offs, w_out, b_out) = offsets(&w.layers);
    let p = &w.params;

    // Output projection.
    let h_last = &cache.h[n_layers - 1][steps - 1];
    for (r, h) in h_last.iter().enumerate() {
        grad[w_out + r] += dy * h;
    }
    grad[b_out] += dy;

    // dh injected from above per (layer, t); top layer receives the output
    // gradient at the final step, lower layers receive dx of the layer
    // above.
    let mut dx_above: Vec<Vec<f64>> = vec![Vec::new(); steps];
    for l in (0..n_layers).rev() {
        let d = w.layers[l];
        let o = &offs[l];
        let mut dh_next = vec![0.0; d.hidden];
        let mut dc_next = vec![0.0; d.hidden];
        let mut dx_here: Vec<Vec<f64>> = vec![vec![0.0; d.input]; steps];

        for t in (0..steps).rev() {
            let mut dh = vec![0.0; d.hidden];
            if l == n_layers - 1 {
                if t == steps - 1 {
                    for r in 0..d.hidden {
                        dh[r] = dy * p[w_out + r];
                    }
                }
            } else {
                dh.copy_from_slice(&dx_above[t]);
            }
            for r in 0..d.hidden {
                dh[r] += dh_next[r];
            }

            let [i_g, f_g, g_g, o_g] = &cache.gates[l][t];
            let tanh_c = &cache.tanh_c[l][t];
            let c_prev: &[f64] = if t == 0 { &[] } else { &cache.c[l][t - 1] };

            let mut dz = [
                vec![0.0; d.hidden],
                vec![0.0; d.hidden],
                vec![0.0; d.hidden],
                vec![0.0; d.hidden],
            ];
            let mut dc_prev = vec![0.0; d.hidden];
            for r in 0..d.hidden {
                let dc = dh[r] * o_g[r] * (1.0 - tanh_c[r] * tanh_c[r]) + dc_next[r];
                let do_ = dh[r] * tanh_c[r];
                let cp = if t == 0 { 0.0 } else { c_prev[r] };
                dz[0][r] = dc * g_g[r] * i_g[r] * (1.0 - i_g[r]);
                dz[1][r] = dc * cp * f_g[r] * (1.0 - f_g[r]);
                dz[2][r] = dc * i_g[r] * (1.0 - g_g[r] * g_g[r]);
                dz[3][r] = do_ * o_g[r] * (1.0 - o_g[r]);
                dc_prev[r] = dc * f_g[r];
            }

            let x = &cache.x[l][t];
            let h_prev: &[f64] = if t == 0 { &[] } else { &cache.h[l][t - 1] };
            let mut dh_prev = vec![0.0; d.hidden];
            let dx = &mut dx_here[t];
            for gate in 0..GATES {
                for r in 0..d.hidden {
                    let dzv = dz[gate][r];
                    if dzv == 0.0 {
                        continue;
                    }
                    let wx_row = o.wx[gate] + r * d.input;
                    for c in 0..d.input {
                        grad[wx_row + c] += dzv * x[c];
                        dx[c] += p[wx_row + c] * dzv;
                    }
                    let wh_row = o.wh[gate] + r * d.hidden;
                    if t > 0 {
                        for c in 0..d.hidden {
                            grad[wh_row + c] += dzv * h_prev[c];
                            dh_prev[c] += p[wh_row + c] * dzv;
                        }
                    }
                    grad[o.b[gate] + r] += dzv;
                }
            }
            dh_next = dh_prev;
            dc_next = dc_prev;
        }
        dx_above = dx_here;
    }
    y
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 200,
        }
    }
}

/// Full-batch Adam on mean squared next-step error. Returns the per-epoch
/// loss trace (including the initial loss).
pub fn train_lstm(
    w: &mut LstmWeights,
    windows: &[Vec<f64>],
    targets: &[f64],
    cfg: &AdamConfig,
) -> Result<Vec<f64>> {
    w.validate()?;
    if windows.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: windows.len(),
            right: targets.len(),
        });
    }
    if windows.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = windows.len() as f64;
    let n_params = w.params.len();
    let mut m1 = vec![0.0; n_params];
    let mut m2 = vec![0.0; n_params];
    let mut grad = vec![0.0; n_params];

    let batch_loss = |w: &LstmWeights| -> f64 {
        windows
            .iter()
            .zip(targets)
            .map(|(win, t)| {
                let (y, _) = forward_cached(w, win);
                (y - t) * (y - t)
            })
            .sum::<f64>()
            / n
    };

    let mut history = Vec::with_capacity(cfg.epochs + 1);
    history.push(batch_loss(w));

    for epoch in 0..cfg.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for (win, target) in windows.iter().zip(targets) {
            let (y, _) = forward_cached(w, win);
            let e = y - target;
            loss += e * e;
            lstm_backward(w, win, 2.0 * e / n, &mut grad);
        }
        loss /= n;
        if !loss.is_finite() {
            return Err(Error::NonFinite { iteration: epoch });
        }

        let t = (epoch + 1) as f64;
        let bc1 = 1.0 - cfg.beta1.powf(t);
        let bc2 = 1.0 - cfg.beta2.powf(t);
        for j in 0..n_params {
            m1[j] = cfg.beta1 * m1[j] + (1.0 - cfg.beta1) * grad[j];
            m2[j] = cfg.beta2 * m2[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
            let mhat = m1[j] / bc1;
            let vhat = m2[j] / bc2;
            w.params[j] -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.epsilon);
        }
        history.push(batch_loss(w));
    }
    Ok(history)
}
