//! Plain CIDEr: per-order TF-IDF cosine similarity between a candidate and
//! each of its references, document frequencies taken over the reference
//! sets of the whole corpus.

use std::collections::{HashMap, HashSet};

use super::ngram::{Ngram, NgramProfile, MAX_ORDER};
use super::ScoredPair;

#[derive(Debug, Clone, PartialEq)]
pub struct CiderResult {
    /// Per-pair scores on the 0-1000 scale, in input order.
    pub per_video: Vec<(String, f64)>,
    pub mean: f64,
}

struct DocFreq {
    counts: [HashMap<Ngram, usize>; MAX_ORDER],
    log_docs: f64,
}

impl DocFreq {
    fn new(pairs: &[ScoredPair]) -> DocFreq {
        let mut counts: [HashMap<Ngram, usize>; MAX_ORDER] = Default::default();
        for pair in pairs {
            for n in 1..=MAX_ORDER {
                let mut seen: HashSet<&[String]> = HashSet::new();
                for r in &pair.references {
                    for gram in r.words().windows(n) {
                        seen.insert(gram);
                    }
                }
                for gram in seen {
                    *counts[n - 1].entry(gram.to_vec()).or_insert(0) += 1;
                }
            }
        }
        DocFreq {
            counts,
            log_docs: (pairs.len() as f64).ln(),
        }
    }

    fn idf(&self, n: usize, gram: &Ngram) -> f64 {
        let df = self.counts[n - 1].get(gram).copied().unwrap_or(1).max(1);
        self.log_docs - (df as f64).ln()
    }

    fn vector(&self, profile: &NgramProfile, n: usize) -> HashMap<Ngram, f64> {
        let total = profile.total(n);
        if total == 0 {
            return HashMap::new();
        }
        profile
            .order(n)
            .iter()
            .map(|(gram, &count)| {
                let tf = count as f64 / total as f64;
                (gram.clone(), tf * self.idf(n, gram))
            })
            .collect()
    }
}

fn cosine(a: &HashMap<Ngram, f64>, b: &HashMap<Ngram, f64>) -> f64 {
    let norm_a = a.values().map(|v| v * v).sum::<f64>().sqrt();
    let norm_b = b.values().map(|v| v * v).sum::<f64>().sqrt();
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().filter_map(|(g, v)| large.get(g).map(|w| v * w)).sum();
    dot / (norm_a * norm_b)
}

/// CIDEr for every pair plus the corpus mean, both on the 0-1000 scale.
pub fn cider_corpus(pairs: &[ScoredPair]) -> CiderResult {
    let df = DocFreq::new(pairs);
    let per_video: Vec<(String, f64)> = pairs
        .iter()
        .map(|pair| {
            let cand = NgramProfile::new(pair.candidate.words());
            let refs: Vec<NgramProfile> = pair.references.iter().map(|r| NgramProfile::new(r.words())).collect();
            let mut sum = 0.0;
            for n in 1..=MAX_ORDER {
                let cv = df.vector(&cand, n);
                let per_ref: f64 = refs.iter().map(|r| cosine(&cv, &df.vector(r, n))).sum();
                sum += per_ref / refs.len() as f64;
            }
            let score = (1000.0 * sum / MAX_ORDER as f64).clamp(0.0, 1000.0);
            (pair.video_id.clone(), score)
        })
        .collect();
    let mean = super::order_free_mean(per_video.iter().map(|(_, s)| *s));
    CiderResult { per_video, mean }
}
