//! Feature-space diagnostics: t-SNE embeddings and per-alteration
//! neighbor purity.

mod affinity;
mod separation;
mod svg;
mod tsne;

use std::fmt::Write;

use thiserror::Error;

pub use affinity::{conditional_affinities, squared_distances, Affinities, MAX_SEARCH_STEPS, PERPLEXITY_TOLERANCE};
pub use separation::{
    nearest_neighbors, neighbor_purity, point_purities, separation_report, LabelPurity, SeparationReport,
    INTERPRETATION,
};
pub use svg::scatter_svg;
pub use tsne::{joint_probabilities, kl_divergence, tsne, Embedding2D, TsneConfig, EXAGGERATION_ITERS};

/// Label of unaltered frames; never reported by [`separation_report`].
pub const ORIGINAL_LABEL: &str = "original";

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Feature vectors tagged with the alteration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoints {
    points: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl LabeledPoints {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<String>) -> Result<LabeledPoints, AnalysisError> {
        if points.len() != labels.len() {
            return Err(AnalysisError::Invalid(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if points.len() < 4 {
            return Err(AnalysisError::Invalid("need at least 4 points".into()));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(AnalysisError::Invalid("points must share a nonzero dimension".into()));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AnalysisError::Invalid("non-finite coordinate".into()));
        }
        Ok(LabeledPoints { points, labels })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `label,x,y` rows with a header line.
pub fn coords_csv(labels: &[String], coords: &[[f64; 2]]) -> String {
    let mut out = String::from("label,x,y\n");
    for (l, c) in labels.iter().zip(coords) {
        let _ = writeln!(out, "{l},{},{}", c[0], c[1]);
    }
    out
}
