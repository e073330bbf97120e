//! Label purity of k-nearest-neighbor sets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::affinity::squared_distances;
use super::{AnalysisError, LabeledPoints, ORIGINAL_LABEL};

pub const INTERPRETATION: &str = "Purity is the mean share of a point's k nearest feature-space neighbors \
that carry the same alteration label. High purity means the alteration moves frames into their own \
region of feature space, away from the original distribution, so training with that augmentation is \
likely to matter. Purity near the label's share of the data means the alteration overlaps the originals.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelPurity {
    pub label: String,
    pub points: usize,
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub k: usize,
    /// Sorted by purity, highest first; ties by label.
    pub labels: Vec<LabelPurity>,
    pub interpretation: String,
}

/// Indices of the `k` nearest neighbors of every point, self excluded,
/// equal distances broken by the smaller index.
pub fn nearest_neighbors(points: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let d = squared_distances(points);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| d[i * n + a].total_cmp(&d[i * n + b]).then(a.cmp(&b)));
            others.truncate(k);
            others
        })
        .collect()
}

/// Per-point fraction of the k nearest neighbors sharing its label.
pub fn point_purities(points: &[Vec<f64>], labels: &[String], k: usize) -> Vec<f64> {
    nearest_neighbors(points, k)
        .iter()
        .enumerate()
        .map(|(i, nn)| nn.iter().filter(|&&j| labels[j] == labels[i]).count() as f64 / k as f64)
        .collect()
}

/// Mean per-point purity over all points.
pub fn neighbor_purity(points: &[Vec<f64>], labels: &[String], k: usize) -> f64 {
    let p = point_purities(points, labels, k);
    p.iter().sum::<f64>() / p.len() as f64
}

/// Purity of every non-original label, measured in the original feature space.
pub fn separation_report(data: &LabeledPoints, k: usize) -> Result<SeparationReport, AnalysisError> {
    if k == 0 || k >= data.len() {
        return Err(AnalysisError::Invalid(format!(
            "k must lie in [1, {}), got {k}",
            data.len()
        )));
    }
    let purities = point_purities(data.points(), data.labels(), k);
    let mut per_label: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for (label, p) in data.labels().iter().zip(&purities) {
        if label != ORIGINAL_LABEL {
            let e = per_label.entry(label).or_default();
            e.0 += 1;
            e.1 += p;
        }
    }
    let mut labels: Vec<LabelPurity> = per_label
        .into_iter()
        .map(|(label, (count, sum))| LabelPurity {
            label: label.to_string(),
            points: count,
            purity: sum / count as f64,
        })
        .collect();
    labels.sort_by(|a, b| b.purity.total_cmp(&a.purity).then_with(|| a.label.cmp(&b.label)));
    Ok(SeparationReport {
        k,
        labels,
        interpretation: INTERPRETATION.to_string(),
    })
}
