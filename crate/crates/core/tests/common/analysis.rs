use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Two isotropic unit-variance blobs in `dim` dimensions, the second
/// shifted by `separation` along every axis. First blob is "original",
/// second is `shifted_label`.
pub fn two_blobs(
    per_blob: usize,
    dim: usize,
    separation: f64,
    seed: u64,
    shifted_label: &str,
) -> (Vec<Vec<f64>>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for blob in 0..2 {
        for _ in 0..per_blob {
            let shift = blob as f64 * separation / (dim as f64).sqrt();
            points.push((0..dim).map(|_| normal.sample(&mut rng) + shift).collect());
            labels.push(if blob == 0 {
                "original".to_string()
            } else {
                shifted_label.to_string()
            });
        }
    }
    (points, labels)
}

/// Row `i` of P(j|i) found by scanning sigma on a fixed grid and keeping the
/// value whose perplexity is closest to the target.
pub fn grid_search_row(points: &[Vec<f64>], i: usize, perplexity: f64, lo: f64, hi: f64, step: f64) -> (f64, Vec<f64>) {
    let d: Vec<f64> = points
        .iter()
        .map(|q| points[i].iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    let row_for = |sigma: f64| {
        let w: Vec<f64> = d
            .iter()
            .enumerate()
            .map(|(j, dj)| {
                if j == i {
                    0.0
                } else {
                    (-dj / (2.0 * sigma * sigma)).exp()
                }
            })
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|v| v / z).collect::<Vec<f64>>()
    };
    let perp_of = |row: &[f64]| {
        let h: f64 = -row.iter().filter(|&&v| v > 0.0).map(|v| v * v.log2()).sum::<f64>();
        h.exp2()
    };
    let scan = |lo: f64, hi: f64, step: f64| {
        let steps = ((hi - lo) / step).round() as usize;
        let mut best = (f64::INFINITY, lo);
        for s in 0..=steps {
            let sigma = lo + s as f64 * step;
            let gap = (perp_of(&row_for(sigma)) - perplexity).abs();
            if gap < best.0 {
                best = (gap, sigma);
            }
        }
        best.1
    };
    // coarse pass over the whole range, then the fine grid around its pick
    let coarse = scan(lo, hi, 1e-3);
    let sigma = scan((coarse - 2e-3).max(lo), coarse + 2e-3, step);
    (sigma, row_for(sigma))
}
