//! Exact t-SNE with a monotone (backtracking) descent after early exaggeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::affinity::conditional_affinities;
use super::AnalysisError;

pub const EXAGGERATION: f64 = 4.0;
pub const EXAGGERATION_ITERS: usize = 100;
pub const MOMENTUM_SWITCH: usize = 250;
pub const MAX_HALVINGS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iters: usize,
    pub seed: u64,
    pub learning_rate: f64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iters: 1000,
            seed: 0,
            learning_rate: 200.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding2D {
    pub coords: Vec<[f64; 2]>,
    /// KL(P || Q) after every iteration, always against the unexaggerated P.
    pub kl_trace: Vec<f64>,
}

/// Symmetrized joint probabilities `(P(j|i) + P(i|j)) / 2N`, row-major.
pub fn joint_probabilities(points: &[Vec<f64>], perplexity: f64) -> Result<Vec<f64>, AnalysisError> {
    let cond = conditional_affinities(points, perplexity)?;
    let n = points.len();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = (cond.get(i, j) + cond.get(j, i)) / (2.0 * n as f64);
        }
    }
    Ok(p)
}

fn kernel(y: &[[f64; 2]], i: usize, j: usize) -> f64 {
    let dx = y[i][0] - y[j][0];
    let dy = y[i][1] - y[j][1];
    1.0 / (1.0 + dx * dx + dy * dy)
}

/// Student-t normalizer `Z = Σ_{i≠j} (1 + |y_i - y_j|²)⁻¹`.
fn normalizer(y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).filter(|&j| j != i).map(|j| kernel(y, i, j)).sum())
        .collect();
    partial.iter().sum()
}

pub fn kl_divergence(p: &[f64], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let z = normalizer(y);
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                let pij = p[i * n + j];
                if j != i && pij > 0.0 {
                    s += pij * (pij * z / kernel(y, i, j)).ln();
                }
            }
            s
        })
        .collect();
    partial.iter().sum()
}

fn gradient(p: &[f64], y: &[[f64; 2]], exaggeration: f64) -> Vec<[f64; 2]> {
    let n = y.len();
    let z = normalizer(y);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut g = [0.0; 2];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let w = kernel(y, i, j);
                let coeff = 4.0 * (exaggeration * p[i * n + j] - w / z) * w;
                g[0] += coeff * (y[i][0] - y[j][0]);
                g[1] += coeff * (y[i][1] - y[j][1]);
            }
            g
        })
        .collect()
}

fn shifted(y: &[[f64; 2]], v: &[[f64; 2]], scale: f64) -> Vec<[f64; 2]> {
    y.iter()
        .zip(v)
        .map(|(a, b)| [a[0] + scale * b[0], a[1] + scale * b[1]])
        .collect()
}

/// Embeds `points` in 2-D.
///
/// Iterations before [`EXAGGERATION_ITERS`] use exaggerated P and plain
/// momentum steps. Afterwards a step that would raise the KL divergence is
/// halved up to [`MAX_HALVINGS`] times; if it still raises KL it is
/// dropped and the momentum is reset, so the trace never goes up.
pub fn tsne(points: &[Vec<f64>], config: &TsneConfig) -> Result<Embedding2D, AnalysisError> {
    let n = points.len();
    if n < 4 {
        return Err(AnalysisError::Invalid(format!(
            "t-SNE needs at least 4 points, got {n}"
        )));
    }
    let p = joint_probabilities(points, config.perplexity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    let mut velocity = vec![[0.0; 2]; n];
    let mut kl = kl_divergence(&p, &y);
    let mut kl_trace = Vec::with_capacity(config.iters);

    for iter in 0..config.iters {
        let exaggerating = iter < EXAGGERATION_ITERS;
        let momentum = if iter < MOMENTUM_SWITCH { 0.5 } else { 0.8 };
        let grad = gradient(&p, &y, if exaggerating { EXAGGERATION } else { 1.0 });
        for (v, g) in velocity.iter_mut().zip(&grad) {
            v[0] = momentum * v[0] - config.learning_rate * g[0];
            v[1] = momentum * v[1] - config.learning_rate * g[1];
        }
        if exaggerating {
            y = shifted(&y, &velocity, 1.0);
            kl = kl_divergence(&p, &y);
        } else {
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let candidate = shifted(&y, &velocity, scale);
                let candidate_kl = kl_divergence(&p, &candidate);
                if candidate_kl <= kl {
                    y = candidate;
                    kl = candidate_kl;
                    velocity.iter_mut().for_each(|v| {
                        v[0] *= scale;
                        v[1] *= scale;
                    });
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                velocity.iter_mut().for_each(|v| *v = [0.0; 2]);
            }
        }
        kl_trace.push(kl);
    }
    Ok(Embedding2D { coords: y, kl_trace })
}
