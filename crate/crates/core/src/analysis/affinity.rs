//! Perplexity-calibrated Gaussian neighbor distributions.

use rayon::prelude::*;

use super::AnalysisError;

pub const PERPLEXITY_TOLERANCE: f64 = 1e-3;
pub const MAX_SEARCH_STEPS: usize = 100;
/// The bisection keeps going well past the contract tolerance.
const SEARCH_STOP: f64 = 1e-10;

/// Row-stochastic neighbor matrix `P(j|i)` (row `i`, column `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct Affinities {
    n: usize,
    p: Vec<f64>,
    /// `2^H(P_i)` actually reached for each row.
    pub achieved_perplexity: Vec<f64>,
    /// Rows whose off-diagonal distances are all equal and got uniform mass.
    pub degenerate: Vec<bool>,
}

impl Affinities {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[i * self.n..(i + 1) * self.n]
    }
}

pub fn squared_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    d.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
        }
    });
    d
}

/// Row distribution for precision `beta` over distances already shifted so
/// the smallest is 0. Returns the row and its entropy in bits.
fn gaussian_row(dist: &[f64], beta: f64) -> (Vec<f64>, f64) {
    let w: Vec<f64> = dist.iter().map(|d| (-beta * d).exp()).collect();
    let z: f64 = w.iter().sum();
    let p: Vec<f64> = w.into_iter().map(|v| v / z).collect();
    let h = -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.log2()).sum::<f64>();
    (p, h)
}

/// Calibrates one row; `dist` excludes the diagonal.
fn calibrate(dist: &[f64], perplexity: f64) -> (Vec<f64>, f64, bool) {
    let min = dist.iter().copied().fold(f64::INFINITY, f64::min);
    let max = dist.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max - min <= 0.0 {
        let m = dist.len();
        return (vec![1.0 / m as f64; m], m as f64, true);
    }
    // scale-free search variable: beta = exp(t) / spread
    let spread = max - min;
    let shifted: Vec<f64> = dist.iter().map(|d| (d - min) / spread).collect();
    let (mut lo, mut hi) = (-40.0f64, 60.0f64);
    let mut best = gaussian_row(&shifted, 1.0);
    let mut best_gap = f64::INFINITY;
    for _ in 0..MAX_SEARCH_STEPS {
        let t = 0.5 * (lo + hi);
        let (row, h) = gaussian_row(&shifted, t.exp());
        let perp = h.exp2();
        let gap = (perp - perplexity).abs();
        if gap < best_gap {
            best_gap = gap;
            best = (row, h);
        }
        if gap < SEARCH_STOP {
            break;
        }
        if perp > perplexity {
            lo = t;
        } else {
            hi = t;
        }
    }
    let (row, h) = best;
    (row, h.exp2(), false)
}

/// Conditional affinities `P(j|i)` with each row's Gaussian bandwidth set by
/// bisection so that `2^H(P_i)` matches `perplexity` within
/// [`PERPLEXITY_TOLERANCE`] (in practice far closer).
pub fn conditional_affinities(points: &[Vec<f64>], perplexity: f64) -> Result<Affinities, AnalysisError> {
    let n = points.len();
    if n < 2 {
        return Err(AnalysisError::Invalid("need at least two points".into()));
    }
    if !(perplexity > 1.0 && perplexity < n as f64) {
        return Err(AnalysisError::Invalid(format!(
            "perplexity must lie in (1, {n}), got {perplexity}"
        )));
    }
    let d = squared_distances(points);
    let rows: Vec<(Vec<f64>, f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let dist: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d[i * n + j]).collect();
            calibrate(&dist, perplexity)
        })
        .collect();
    let mut p = vec![0.0; n * n];
    let mut achieved = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    for (i, (row, perp, degen)) in rows.into_iter().enumerate() {
        let others = (0..n).filter(|&j| j != i);
        for (j, v) in others.zip(row) {
            p[i * n + j] = v;
        }
        achieved.push(perp);
        degenerate.push(degen);
    }
    Ok(Affinities {
        n,
        p,
        achieved_perplexity: achieved,
        degenerate,
    })
}
