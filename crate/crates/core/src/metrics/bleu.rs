use std::collections::HashMap;

use super::ngram::{NgramProfile, MAX_ORDER};
use super::ScoredPair;

/// Corpus-level sufficient statistics for BLEU-4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    /// Clipped matching n-gram counts, index n-1.
    pub matches: [usize; MAX_ORDER],
    /// Candidate n-gram totals, index n-1.
    pub totals: [usize; MAX_ORDER],
    pub candidate_len: usize,
    /// Sum of closest reference lengths.
    pub reference_len: usize,
}

impl BleuStats {
    pub fn of_pair(pair: &ScoredPair) -> BleuStats {
        let cand = pair.candidate.words();
        let cand_profile = NgramProfile::new(cand);
        let ref_profiles: Vec<NgramProfile> = pair.references.iter().map(|r| NgramProfile::new(r.words())).collect();

        let mut stats = BleuStats {
            candidate_len: cand.len(),
            reference_len: closest_ref_len(cand.len(), pair),
            ..BleuStats::default()
        };
        for n in 1..=MAX_ORDER {
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for profile in &ref_profiles {
                for (gram, &count) in profile.order(n) {
                    let slot = max_ref.entry(gram.as_slice()).or_insert(0);
                    *slot = (*slot).max(count);
                }
            }
            for (gram, &count) in cand_profile.order(n) {
                let cap = max_ref.get(gram.as_slice()).copied().unwrap_or(0);
                stats.matches[n - 1] += count.min(cap);
                stats.totals[n - 1] += count;
            }
        }
        stats
    }

    pub fn merge(&mut self, other: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.candidate_len += other.candidate_len;
        self.reference_len += other.reference_len;
    }

    pub fn brevity_penalty(&self) -> f64 {
        let c = self.candidate_len as f64;
        let r = self.reference_len as f64;
        if c == 0.0 {
            0.0
        } else if c <= r {
            (1.0 - r / c).exp()
        } else {
            1.0
        }
    }

    /// BLEU-4 on the 0-100 scale.
    pub fn score(&self, smoothing: bool) -> f64 {
        let mut log_sum = 0.0;
        for n in 0..MAX_ORDER {
            let total = self.totals[n];
            let p = if self.matches[n] > 0 {
                self.matches[n] as f64 / total as f64
            } else if smoothing && total > 0 {
                1.0 / (2.0 * total as f64)
            } else {
                return 0.0;
            };
            log_sum += p.ln();
        }
        100.0 * self.brevity_penalty() * (log_sum / MAX_ORDER as f64).exp()
    }
}

fn closest_ref_len(cand_len: usize, pair: &ScoredPair) -> usize {
    pair.references
        .iter()
        .map(|r| r.words().len())
        .min_by_key(|&len| (len.abs_diff(cand_len), len))
        .unwrap_or(0)
}

/// Corpus BLEU-4 in [0, 100]: clipped n-gram counts and closest reference
/// lengths summed over every pair before the precisions are formed.
pub fn bleu4_corpus(pairs: &[ScoredPair], smoothing: bool) -> f64 {
    let mut total = BleuStats::default();
    for pair in pairs {
        total.merge(&BleuStats::of_pair(pair));
    }
    total.score(smoothing)
}
