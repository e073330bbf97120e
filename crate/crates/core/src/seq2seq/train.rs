//! Mini-batch SGD with validation-METEOR early stopping.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::model::{Seq2SeqParams, Weights};
use super::ModelError;
use crate::features::FeatureSequence;
use crate::metrics::{meteor, order_free_mean, MetricConfig, ScoredPair};
use crate::text::TokenizedSentence;

pub const DEFAULT_MAX_LEN: usize = 30;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub max_decode_len: usize,
    pub metric: MetricConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.1,
            batch_size: 64,
            patience: 10,
            max_epochs: 1000,
            seed: 0,
            max_decode_len: DEFAULT_MAX_LEN,
            metric: MetricConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_meteor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub best_meteor: f64,
}

struct Sample {
    features: Vec<Vec<f64>>,
    ids: Vec<usize>,
}

/// Corpus-mean METEOR of greedy decodes. An empty decode scores 0.
pub fn validation_meteor(
    params: &Seq2SeqParams,
    val: &[(FeatureSequence, Vec<TokenizedSentence>)],
    max_len: usize,
    metric: &MetricConfig,
) -> Result<f64, ModelError> {
    let opts = metric.meteor_options();
    let scores: Vec<f64> = val
        .par_iter()
        .map(|(feats, refs)| {
            let cand = params.greedy_decode(feats, max_len)?;
            Ok(match ScoredPair::new(feats.video_id(), cand, refs.clone()) {
                Ok(pair) => meteor(&pair, &opts),
                Err(_) => 0.0,
            })
        })
        .collect::<Result<_, ModelError>>()?;
    Ok(order_free_mean(scores.into_iter()))
}

/// One SGD step on a batch: mean loss and mean gradient, reduced in sample order.
fn batch_step(params: &mut Seq2SeqParams, batch: &[&Sample], lr: f64) -> Vec<f64> {
    let results: Vec<(f64, Weights)> = batch
        .par_iter()
        .map(|s| {
            let (loss, cache) = params.forward_ids(&s.features, &s.ids);
            (loss, params.backward(&cache))
        })
        .collect();
    let mut total = params.weights().zeros_like();
    let mut losses = Vec::with_capacity(results.len());
    for (loss, g) in &results {
        total.axpy(1.0, g);
        losses.push(*loss);
    }
    total.scale(1.0 / batch.len() as f64);
    params.apply_update(lr, &total);
    losses
}

/// Trains until validation METEOR stalls for `patience` epochs (or
/// `max_epochs` is reached) and returns the best parameters seen.
pub fn sgd_train(
    mut params: Seq2SeqParams,
    train: &[(FeatureSequence, TokenizedSentence)],
    val: &[(FeatureSequence, Vec<TokenizedSentence>)],
    config: &TrainConfig,
) -> Result<(Seq2SeqParams, TrainingLog), ModelError> {
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let samples: Vec<Sample> = train
        .iter()
        .map(|(feats, caption)| {
            let features = feats.to_f64();
            params.check_features(&features)?;
            let ids = params.target_ids(&caption.tagged())?;
            Ok(Sample { features, ids })
        })
        .collect::<Result<_, ModelError>>()?;
    let batch_size = config.batch_size.clamp(1, samples.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();

    let mut best = params.clone();
    let mut best_meteor = f64::NEG_INFINITY;
    let mut best_epoch = 0;
    let mut stale = 0;
    let mut epochs = Vec::new();

    for epoch in 1..=config.max_epochs.max(1) {
        order.shuffle(&mut rng);
        let mut losses = Vec::with_capacity(samples.len());
        for chunk in order.chunks(batch_size) {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &samples[i]).collect();
            let batch_losses = batch_step(&mut params, &batch, config.lr);
            if batch_losses.iter().any(|l| !l.is_finite()) || !params.weights().is_finite() {
                return Err(ModelError::Divergence { epoch });
            }
            losses.extend(batch_losses);
        }
        let train_loss = losses.iter().sum::<f64>() / losses.len() as f64;
        let val_meteor = validation_meteor(&params, val, config.max_decode_len, &config.metric)?;
        epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_meteor,
        });
        if val_meteor > best_meteor {
            best_meteor = val_meteor;
            best_epoch = epoch;
            best = params.clone();
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }
    Ok((
        best,
        TrainingLog {
            epochs,
            best_epoch,
            best_meteor,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::super::model::fixtures::*;
    use super::*;

    fn caption(s: &str) -> TokenizedSentence {
        TokenizedSentence::from_words(s.split_whitespace())
    }

    #[test]
    fn stops_after_patience_plus_one_when_meteor_is_flat() {
        let m = model(&["a", "dog", "runs"], 3, 2, 4, 3);
        let feats = features("v", 3, 3, 1);
        let train = vec![(feats.clone(), caption("a dog runs"))];
        // references share no word with the vocabulary: METEOR is always 0
        let val = vec![(feats, vec![caption("zebra")])];
        let config = TrainConfig {
            patience: 10,
            ..TrainConfig::default()
        };
        let initial = m.clone();
        let (best, log) = sgd_train(m, &train, &val, &config).unwrap();
        assert_eq!(log.epochs.len(), 11);
        assert_eq!(log.best_epoch, 1);
        assert!(log.epochs.iter().all(|e| e.val_meteor == 0.0));
        assert_ne!(best, initial);

        let (one, _) = sgd_train(
            initial,
            &train,
            &val,
            &TrainConfig {
                max_epochs: 1,
                ..config
            },
        )
        .unwrap();
        assert_eq!(best, one);
    }

    #[test]
    fn zero_learning_rate_changes_nothing() {
        let m = model(&["a", "dog"], 3, 2, 4, 6);
        let train = vec![(features("v", 2, 3, 1), caption("a dog"))];
        let config = TrainConfig {
            lr: 0.0,
            patience: 1,
            ..TrainConfig::default()
        };
        let (best, _) = sgd_train(m.clone(), &train, &[], &config).unwrap();
        for ((_, a), (_, b)) in best.weights().tensors().iter().zip(m.weights().tensors()) {
            let bits = |m: &crate::seq2seq::Matrix| m.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(a), bits(b));
        }
    }

    #[test]
    fn same_seed_same_log() {
        let m = model(&["a", "dog", "cat", "runs"], 3, 3, 5, 2);
        let train: Vec<_> = (0..6)
            .map(|i| {
                let c = if i % 2 == 0 { "a dog runs" } else { "a cat" };
                (features(&format!("v{i}"), 3, 3, i), caption(c))
            })
            .collect();
        let val = vec![(features("w", 3, 3, 99), vec![caption("a dog runs")])];
        let config = TrainConfig {
            batch_size: 4,
            patience: 3,
            max_epochs: 8,
            seed: 17,
            ..TrainConfig::default()
        };
        let (a, la) = sgd_train(m.clone(), &train, &val, &config).unwrap();
        let (b, lb) = sgd_train(m, &train, &val, &config).unwrap();
        assert_eq!(la, lb);
        assert_eq!(a, b);
    }

    #[test]
    fn huge_learning_rate_diverges() {
        let m = model(&["a", "dog"], 3, 2, 4, 6);
        let train = vec![(features("v", 2, 3, 1), caption("a dog"))];
        let config = TrainConfig {
            lr: 1e300,
            ..TrainConfig::default()
        };
        assert!(matches!(
            sgd_train(m, &train, &[], &config),
            Err(ModelError::Divergence { .. })
        ));
    }

    #[test]
    fn empty_training_set() {
        let m = model(&["a"], 3, 2, 4, 6);
        assert!(matches!(
            sgd_train(m, &[], &[], &TrainConfig::default()),
            Err(ModelError::EmptyTrainingSet)
        ));
    }
}
