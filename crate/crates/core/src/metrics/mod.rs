//! Caption metrics: BLEU-4, ROUGE-L, METEOR and CIDEr.
//!
//! BLEU-4, ROUGE-L and METEOR are reported on a 0-100 scale, CIDEr on 0-1000.

pub mod bleu;
pub mod cider;
pub mod meteor;
pub mod ngram;
pub mod rouge;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::TokenizedSentence;

pub use bleu::{bleu4_corpus, BleuStats};
pub use cider::{cider_corpus, CiderResult};
pub use meteor::{meteor, MeteorOptions, SynonymTable};
pub use ngram::NgramProfile;
pub use rouge::{rouge_l, DEFAULT_BETA};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("no pairs to score")]
    EmptyCorpus,
    #[error("video {0:?} has no references")]
    NoReferences(String),
    #[error("video {0:?} has an empty candidate or reference")]
    EmptySentence(String),
}

/// One candidate caption with the references it is scored against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredPair {
    video_id: String,
    candidate: TokenizedSentence,
    references: Vec<TokenizedSentence>,
}

impl ScoredPair {
    /// Tags are stripped from every sentence.
    pub fn new(
        video_id: impl Into<String>,
        candidate: TokenizedSentence,
        references: Vec<TokenizedSentence>,
    ) -> Result<ScoredPair, MetricError> {
        let video_id = video_id.into();
        if references.is_empty() {
            return Err(MetricError::NoReferences(video_id));
        }
        let candidate = candidate.untagged();
        let references: Vec<_> = references.iter().map(TokenizedSentence::untagged).collect();
        if candidate.is_empty() || references.iter().any(TokenizedSentence::is_empty) {
            return Err(MetricError::EmptySentence(video_id));
        }
        Ok(ScoredPair {
            video_id,
            candidate,
            references,
        })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn candidate(&self) -> &TokenizedSentence {
        &self.candidate
    }

    pub fn references(&self) -> &[TokenizedSentence] {
        &self.references
    }

    pub fn with_extra_reference(&self, reference: TokenizedSentence) -> ScoredPair {
        let mut out = self.clone();
        out.references.push(reference.untagged());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bleu4: f64,
    pub rouge_l: f64,
    pub meteor: f64,
    pub cider: f64,
}

impl MetricReport {
    pub fn as_array(&self) -> [f64; 4] {
        [self.bleu4, self.rouge_l, self.meteor, self.cider]
    }

    /// One-decimal rendering, the usual table precision.
    pub fn display_row(&self) -> String {
        format!(
            "B4 {:.1}  R_L {:.1}  M {:.1}  C {:.1}",
            self.bleu4, self.rouge_l, self.meteor, self.cider
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricConfig {
    pub bleu_smoothing: bool,
    pub rouge_beta: f64,
    pub meteor_stem: bool,
    pub synonyms: Option<SynonymTable>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            bleu_smoothing: false,
            rouge_beta: DEFAULT_BETA,
            meteor_stem: true,
            synonyms: None,
        }
    }
}

impl MetricConfig {
    pub fn meteor_options(&self) -> MeteorOptions<'_> {
        MeteorOptions {
            stem: self.meteor_stem,
            synonyms: self.synonyms.as_ref(),
        }
    }
}

/// Mean that does not depend on the order of its inputs, bit for bit.
pub(crate) fn order_free_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

/// Corpus METEOR: mean of per-pair scores.
pub fn meteor_corpus(pairs: &[ScoredPair], opts: &MeteorOptions) -> f64 {
    let scores: Vec<f64> = pairs.par_iter().map(|p| meteor(p, opts)).collect();
    order_free_mean(scores.into_iter())
}

pub fn rouge_l_corpus(pairs: &[ScoredPair], beta: f64) -> f64 {
    let scores: Vec<f64> = pairs.par_iter().map(|p| rouge_l(p, beta)).collect();
    order_free_mean(scores.into_iter())
}

/// All four metrics over a corpus.
pub fn evaluate(pairs: &[ScoredPair], config: &MetricConfig) -> Result<MetricReport, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    Ok(MetricReport {
        bleu4: bleu4_corpus(pairs, config.bleu_smoothing),
        rouge_l: rouge_l_corpus(pairs, config.rouge_beta),
        meteor: meteor_corpus(pairs, &config.meteor_options()),
        cider: cider_corpus(pairs).mean,
    })
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::ScoredPair;
    use crate::text::TokenizedSentence;

    pub fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    pub fn pair_for(id: &str, cand: &str, refs: &[&str]) -> ScoredPair {
        ScoredPair::new(
            id,
            TokenizedSentence::from_words(words(cand)),
            refs.iter().map(|r| TokenizedSentence::from_words(words(r))).collect(),
        )
        .unwrap()
    }

    pub fn pair(cand: &str, refs: &[&str]) -> ScoredPair {
        pair_for("v", cand, refs)
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::pair_for;
    use super::*;

    fn fixture() -> Vec<ScoredPair> {
        vec![
            pair_for("v1", "a man is slicing a tomato", &["a man is slicing a tomato"]),
            pair_for("v2", "two dogs play in the snow", &["two dogs play in the snow"]),
            pair_for("v3", "a girl rides a horse", &["a girl rides a horse"]),
        ]
    }

    #[test]
    fn identity_report() {
        let r = evaluate(&fixture(), &MetricConfig::default()).unwrap();
        assert!((r.bleu4 - 100.0).abs() < 1e-9);
        assert!((r.rouge_l - 100.0).abs() < 1e-9);
        assert!(r.meteor >= 99.0);
        assert!((r.cider - 1000.0).abs() < 1e-6, "{}", r.cider);
    }

    #[test]
    fn disjoint_report_is_zero() {
        let pairs = vec![pair_for("v1", "x y z", &["a b c"]), pair_for("v2", "p q", &["d e f"])];
        let r = evaluate(&pairs, &MetricConfig::default()).unwrap();
        assert_eq!(r.as_array(), [0.0; 4]);
    }

    #[test]
    fn report_composes_individual_metrics() {
        let pairs = vec![
            pair_for(
                "v1",
                "a man rides a bike",
                &["a man is riding a bicycle", "a person cycles"],
            ),
            pair_for("v2", "a cat sleeps", &["the cat is sleeping", "a kitten naps on a bed"]),
            pair_for("v3", "people dance", &["people are dancing", "a group dances"]),
        ];
        let cfg = MetricConfig::default();
        let r = evaluate(&pairs, &cfg).unwrap();
        assert_eq!(r.bleu4, bleu4_corpus(&pairs, false));
        assert_eq!(r.cider, cider_corpus(&pairs).mean);
        let m: Vec<f64> = pairs.iter().map(|p| meteor(p, &cfg.meteor_options())).collect();
        assert!((r.meteor - m.iter().sum::<f64>() / 3.0).abs() < 1e-12);
        let rl: Vec<f64> = pairs.iter().map(|p| rouge_l(p, DEFAULT_BETA)).collect();
        assert!((r.rouge_l - rl.iter().sum::<f64>() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariant() {
        let mut pairs = fixture();
        pairs[0] = pair_for("v1", "a man slices a tomato", &["a man is slicing a tomato"]);
        let cfg = MetricConfig::default();
        let a = evaluate(&pairs, &cfg).unwrap();
        pairs.reverse();
        let b = evaluate(&pairs, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert_eq!(evaluate(&[], &MetricConfig::default()), Err(MetricError::EmptyCorpus));
        let err = ScoredPair::new("v", TokenizedSentence::from_words(["a"]), vec![]).unwrap_err();
        assert_eq!(err, MetricError::NoReferences("v".into()));
    }
}
