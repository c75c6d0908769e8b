//! Real-coded genetic algorithm searching the VMD hyperparameters
//! (alpha, tau) for minimal reconstruction error.
//!
//! Tournament selection (size 3), per-gene arithmetic blend crossover,
//! Gaussian mutation with sigma at 10% of each bound's width, elitism of
//! one. Fitness evaluations are pure and run in parallel; results are
//! reduced in population order, so a fixed seed gives identical output
//! regardless of thread count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::vmd::{vmd_modes, VmdParams};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_p: f64,
    pub mutation_p: f64,
    pub alpha_bounds: (f64, f64),
    pub tau_bounds: (f64, f64),
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 50,
            generations: 100,
            crossover_p: 0.7,
            mutation_p: 0.1,
            alpha_bounds: (1.0, 5000.0),
            tau_bounds: (0.0, 1.0),
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::InvalidParameter("population size must be >= 2".into()));
        }
        for (name, p) in [("crossover_p", self.crossover_p), ("mutation_p", self.mutation_p)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be in [0,1], got {p}"
                )));
            }
        }
        for (name, (lo, hi)) in [("alpha", self.alpha_bounds), ("tau", self.tau_bounds)] {
            if !(lo < hi) {
                return Err(Error::InvalidParameter(format!(
                    "{name} bounds must satisfy lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaResult {
    pub best_alpha: f64,
    pub best_tau: f64,
    pub best_fitness: f64,
    /// Best fitness after the initial population and after each
    /// generation; elitism keeps it non-increasing.
    pub history: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Individual {
    alpha: f64,
    tau: f64,
}

/// VMD reconstruction MSE at (alpha, tau); solver failures and non-finite
/// results are penalized with +inf rather than aborting the search.
pub fn evaluate_fitness(series: &TimeSeries, alpha: f64, tau: f64, vmd_base: &VmdParams) -> f64 {
    let params = VmdParams {
        alpha,
        tau,
        ..*vmd_base
    };
    let raw = match vmd_modes(series.values(), &params) {
        Ok(raw) => raw,
        Err(_) => return f64::INFINITY,
    };
    let n = series.len();
    let mut acc = 0.0;
    for (i, y) in series.values().iter().enumerate() {
        let sum: f64 = raw.modes.iter().map(|m| m[i]).sum();
        let e = sum - y;
        acc += e * e;
    }
    let mse = acc / n as f64;
    if mse.is_finite() {
        mse
    } else {
        f64::INFINITY
    }
}

/// GA driver over an arbitrary fitness function (the test seam); see
/// [`ga_optimize`] for the VMD-backed entry point.
pub fn ga_optimize_with<F>(fitness: F, cfg: &GaConfig) -> Result<GaResult>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (a_lo, a_hi) = cfg.alpha_bounds;
    let (t_lo, t_hi) = cfg.tau_bounds;
    let sigma_a = 0.1 * (a_hi - a_lo);
    let sigma_t = 0.1 * (t_hi - t_lo);

    let eval = |pop: &[Individual]| -> Vec<f64> {
        pop.par_iter()
            .map(|ind| {
                let f = fitness(ind.alpha, ind.tau);
                if f.is_nan() {
                    f64::INFINITY
                } else {
                    f
                }
            })
            .collect()
    };

    let mut pop: Vec<Individual> = (0..cfg.pop_size)
        .map(|_| Individual {
            alpha: rng.random_range(a_lo..=a_hi),
            tau: rng.random_range(t_lo..=t_hi),
        })
        .collect();
    let mut fit = eval(&pop);

    let best_of = |fit: &[f64]| {
        let mut idx = 0;
        for (i, f) in fit.iter().enumerate() {
            if *f < fit[idx] {
                idx = i;
            }
        }
        idx
    };

    let mut best_idx = best_of(&fit);
    let mut best = pop[best_idx];
    let mut best_fit = fit[best_idx];
    let mut history = vec![best_fit];

    for _ in 0..cfg.generations {
        let mut next = Vec::with_capacity(cfg.pop_size);
        next.push(best); // elitism

        let tournament = |rng: &mut ChaCha8Rng, fit: &[f64]| -> usize {
            let mut winner = rng.random_range(0..fit.len());
            for _ in 0..2 {
                let challenger = rng.random_range(0..fit.len());
                if fit[challenger] < fit[winner] {
                    winner = challenger;
                }
            }
            winner
        };

        while next.len() < cfg.pop_size {
            let p1 = pop[tournament(&mut rng, &fit)];
            let p2 = pop[tournament(&mut rng, &fit)];
            let (mut c1, mut c2) = (p1, p2);
            if rng.random::<f64>() < cfg.crossover_p {
                let w: f64 = rng.random();
                c1.alpha = w * p1.alpha + (1.0 - w) * p2.alpha;
                c2.alpha = (1.0 - w) * p1.alpha + w * p2.alpha;
                let w: f64 = rng.random();
                c1.tau = w * p1.tau + (1.0 - w) * p2.tau;
                c2.tau = (1.0 - w) * p1.tau + w * p2.tau;
            }
            for child in [&mut c1, &mut c2] {
                if rng.random::<f64>() < cfg.mutation_p {
                    child.alpha += gaussian(&mut rng) * sigma_a;
                }
                if rng.random::<f64>() < cfg.mutation_p {
                    child.tau += gaussian(&mut rng) * sigma_t;
                }
                child.alpha = child.alpha.clamp(a_lo, a_hi);
                child.tau = child.tau.clamp(t_lo, t_hi);
            }
            next.push(c1);
            if next.len() < cfg.pop_size {
                next.push(c2);
            }
        }

        pop = next;
        fit = eval(&pop);
        best_idx = best_of(&fit);
        if fit[best_idx] < best_fit {
            best_fit = fit[best_idx];
            best = pop[best_idx];
        }
        history.push(best_fit);
    }

    Ok(GaResult {
        best_alpha: best.alpha,
        best_tau: best.tau,
        best_fitness: best_fit,
        history,
    })
}

/// Searches (alpha, tau) minimizing the VMD reconstruction MSE on `series`.
pub fn ga_optimize(series: &TimeSeries, cfg: &GaConfig, vmd_base: &VmdParams) -> Result<GaResult> {
    ga_optimize_with(|a, t| evaluate_fitness(series, a, t, vmd_base), cfg)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per draw keeps the stream layout simple.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
