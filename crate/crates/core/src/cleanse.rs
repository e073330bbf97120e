//! Caption cleansing: annotation records, their validation and
//! application, error statistics, and the human-performance estimate.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusEntry;
use crate::metrics::{evaluate, MetricConfig, MetricError, MetricReport, ScoredPair};
use crate::text::{tokenize, TextError, TokenizedSentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    None,
    /// The sentence has no meaning.
    Unsuitable,
    /// Mentions actors, actions or objects not in the video.
    Hallucination,
    /// Grammatical error or typo.
    Syntactic,
    ProperNoun,
}

impl ErrorClass {
    pub const ERRORS: [ErrorClass; 4] = [
        ErrorClass::Unsuitable,
        ErrorClass::Hallucination,
        ErrorClass::Syntactic,
        ErrorClass::ProperNoun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::None => "none",
            ErrorClass::Unsuitable => "unsuitable",
            ErrorClass::Hallucination => "hallucination",
            ErrorClass::Syntactic => "syntactic",
            ErrorClass::ProperNoun => "proper_noun",
        }
    }
}

/// One reviewed caption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub video_id: String,
    pub caption_index: usize,
    pub error: ErrorClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<String>,
    pub reviewer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_by: Option<String>,
}

impl AnnotationRecord {
    /// Verified by someone other than the reviewer.
    pub fn is_accepted(&self) -> bool {
        self.verified_by.as_ref().is_some_and(|v| *v != self.reviewer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    MissingCorrection,
    Unverified,
    SelfVerified,
    UnknownVideo,
    IndexOutOfRange {
        captions: usize,
    },
    UnsuitableUnchanged,
    /// Another record targets the same caption with a different outcome.
    Conflicting {
        other: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Position of the offending record in the input list.
    pub record: usize,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "record {}: ", self.record)?;
        match &self.kind {
            ViolationKind::MissingCorrection => {
                write!(f, "error label without a usable correction")
            }
            ViolationKind::Unverified => write!(f, "not double-checked"),
            ViolationKind::SelfVerified => write!(f, "verified by its own reviewer"),
            ViolationKind::UnknownVideo => write!(f, "video not in the corpus"),
            ViolationKind::IndexOutOfRange { captions } => {
                write!(f, "caption index out of range (video has {captions} captions)")
            }
            ViolationKind::UnsuitableUnchanged => {
                write!(f, "unsuitable caption replaced by itself")
            }
            ViolationKind::Conflicting { other } => write!(f, "conflicts with record {other}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CleanseError {
    #[error("{} unresolved violation(s): {}", .0.len(), .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),
    #[error("video {video_id:?} has {found} captions, {needed} needed")]
    InsufficientReferences {
        video_id: String,
        found: usize,
        needed: usize,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn usable_correction(r: &AnnotationRecord) -> bool {
    r.correction
        .as_deref()
        .is_some_and(|c| tokenize(c, false).is_ok_and(|t| !t.is_empty()))
}

fn check(corpus: &[CorpusEntry], records: &[AnnotationRecord], unsuitable_rule: bool) -> Vec<Violation> {
    let videos: HashMap<&str, &CorpusEntry> = corpus.iter().map(|e| (e.video_id.as_str(), e)).collect();
    let mut out = Vec::new();
    let mut first_for: HashMap<(&str, usize), usize> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        let mut push = |kind| out.push(Violation { record: i, kind });
        if r.error != ErrorClass::None && !usable_correction(r) {
            push(ViolationKind::MissingCorrection);
        }
        match &r.verified_by {
            None => push(ViolationKind::Unverified),
            Some(v) if *v == r.reviewer => push(ViolationKind::SelfVerified),
            Some(_) => {}
        }
        match videos.get(r.video_id.as_str()) {
            None => push(ViolationKind::UnknownVideo),
            Some(e) if r.caption_index >= e.captions.len() => push(ViolationKind::IndexOutOfRange {
                captions: e.captions.len(),
            }),
            Some(e) => {
                if unsuitable_rule
                    && r.error == ErrorClass::Unsuitable
                    && r.correction.as_deref() == Some(e.captions[r.caption_index].as_str())
                {
                    push(ViolationKind::UnsuitableUnchanged);
                }
            }
        }
        let key = (r.video_id.as_str(), r.caption_index);
        match first_for.get(&key) {
            Some(&j) if records[j].error != r.error || records[j].correction != r.correction => {
                push(ViolationKind::Conflicting { other: j })
            }
            Some(_) => {}
            None => {
                first_for.insert(key, i);
            }
        }
    }
    out
}

/// Every invariant violation in `records`, in record order.
pub fn validate_records(records: &[AnnotationRecord], corpus: &[CorpusEntry]) -> Vec<Violation> {
    check(corpus, records, true)
}

/// Replaces every annotated caption by its correction.
///
/// The unsuitable-replaced-by-itself rule is not re-checked here: on a
/// corpus that already carries the correction it only means the record was
/// applied before, which keeps the operation idempotent.
pub fn apply_corrections(
    corpus: &[CorpusEntry],
    records: &[AnnotationRecord],
) -> Result<Vec<CorpusEntry>, CleanseError> {
    let violations = check(corpus, records, false);
    if !violations.is_empty() {
        return Err(CleanseError::Validation(violations));
    }
    let mut fixes: HashMap<(&str, usize), &str> = HashMap::new();
    for r in records
        .iter()
        .filter(|r| r.error != ErrorClass::None && r.is_accepted())
    {
        if let Some(c) = &r.correction {
            fixes.insert((r.video_id.as_str(), r.caption_index), c.as_str());
        }
    }
    Ok(corpus
        .iter()
        .map(|e| {
            let mut e = e.clone();
            for (i, caption) in e.captions.iter_mut().enumerate() {
                if let Some(fix) = fixes.get(&(e.video_id.as_str(), i)) {
                    *caption = fix.to_string();
                }
            }
            e
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CleanseStats {
    pub total_captions: usize,
    pub error_captions: usize,
    pub error_rate: f64,
    /// Share of `error_captions` per class; empty when there are no errors.
    pub breakdown: BTreeMap<String, f64>,
}

/// Error rate and per-class shares over the error-labeled records.
pub fn error_stats(records: &[AnnotationRecord], total_captions: usize) -> Result<CleanseStats, CleanseError> {
    let mut counts: BTreeMap<ErrorClass, usize> = BTreeMap::new();
    for r in records.iter().filter(|r| r.error != ErrorClass::None) {
        *counts.entry(r.error).or_default() += 1;
    }
    let error_captions: usize = counts.values().sum();
    if error_captions > total_captions {
        return Err(CleanseError::Invalid(format!(
            "{error_captions} error records but only {total_captions} captions"
        )));
    }
    let breakdown = counts
        .iter()
        .map(|(c, &n)| (c.name().to_string(), n as f64 / error_captions as f64))
        .collect();
    Ok(CleanseStats {
        total_captions,
        error_captions,
        error_rate: if total_captions == 0 {
            0.0
        } else {
            error_captions as f64 / total_captions as f64
        },
        breakdown,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HumanPerformance {
    pub rounds: usize,
    pub per_round: Vec<MetricReport>,
    pub mean: MetricReport,
    /// Population standard deviation over rounds.
    pub std: MetricReport,
}

/// Scores each video's caption `r` against its other captions, for every
/// round `r < rounds`, and summarizes the corpus-level reports.
pub fn human_performance(
    corpus: &[CorpusEntry],
    rounds: usize,
    config: &MetricConfig,
) -> Result<HumanPerformance, CleanseError> {
    if rounds == 0 {
        return Err(CleanseError::Invalid("rounds must be at least 1".into()));
    }
    if corpus.is_empty() {
        return Err(CleanseError::Metric(MetricError::EmptyCorpus));
    }
    let needed = rounds.max(2);
    let mut tokenized = Vec::with_capacity(corpus.len());
    for e in corpus {
        if e.captions.len() < needed {
            return Err(CleanseError::InsufficientReferences {
                video_id: e.video_id.clone(),
                found: e.captions.len(),
                needed,
            });
        }
        let caps = e
            .captions
            .iter()
            .map(|c| tokenize(c, false))
            .collect::<Result<Vec<TokenizedSentence>, _>>()?;
        tokenized.push(caps);
    }
    let per_round = (0..rounds)
        .into_par_iter()
        .map(|r| {
            let pairs = corpus
                .iter()
                .zip(&tokenized)
                .map(|(e, caps)| {
                    let refs = caps
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != r)
                        .map(|(_, c)| c.clone())
                        .collect();
                    ScoredPair::new(e.video_id.clone(), caps[r].clone(), refs)
                })
                .collect::<Result<Vec<_>, _>>()?;
            evaluate(&pairs, config)
        })
        .collect::<Result<Vec<MetricReport>, MetricError>>()?;

    let rows: Vec<[f64; 4]> = per_round.iter().map(MetricReport::as_array).collect();
    let n = rows.len() as f64;
    let mut mean = [0.0; 4];
    let mut std = [0.0; 4];
    for m in 0..4 {
        mean[m] = rows.iter().map(|r| r[m]).sum::<f64>() / n;
        std[m] = (rows.iter().map(|r| (r[m] - mean[m]).powi(2)).sum::<f64>() / n).sqrt();
    }
    let report = |a: [f64; 4]| MetricReport {
        bleu4: a[0],
        rouge_l: a[1],
        meteor: a[2],
        cider: a[3],
    };
    Ok(HumanPerformance {
        rounds,
        per_round,
        mean: report(mean),
        std: report(std),
    })
}

/// Number of captions in a corpus.
pub fn caption_count(corpus: &[CorpusEntry]) -> usize {
    corpus.iter().map(|e| e.captions.len()).sum()
}
