//! Encoder-decoder captioner: forward pass, loss, gradients and greedy decoding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gru::{self, GruParams, GruStepCache};
use super::lstm::{self, EncoderState, LstmParams, LstmStepCache};
use super::tensor::{softmax, Matrix};
use super::ModelError;
use crate::features::FeatureSequence;
use crate::text::{EmbeddingTable, TokenizedSentence, Vocabulary};

/// The trainable tensors. Also used as the container for their gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub encoder: LstmParams,
    pub decoder: GruParams,
    /// Output projection, `|D| × hidden`.
    pub output: Matrix,
}

impl Weights {
    pub fn zeros(feature_dim: usize, embed_dim: usize, hidden_dim: usize, vocab_len: usize) -> Weights {
        Weights {
            encoder: LstmParams::zeros(feature_dim, hidden_dim),
            decoder: GruParams::zeros(embed_dim, hidden_dim),
            output: Matrix::zeros(vocab_len, hidden_dim),
        }
    }

    /// Uniform in `[-k, k]`, `k = 1/sqrt(hidden_dim)`.
    pub fn uniform(feature_dim: usize, embed_dim: usize, hidden_dim: usize, vocab_len: usize, seed: u64) -> Weights {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 1.0 / (hidden_dim as f64).sqrt();
        let encoder = LstmParams::uniform(feature_dim, hidden_dim, &mut rng);
        let decoder = GruParams::uniform(embed_dim, hidden_dim, &mut rng);
        let output = Matrix::uniform(vocab_len, hidden_dim, k, &mut rng);
        Weights {
            encoder,
            decoder,
            output,
        }
    }

    pub fn zeros_like(&self) -> Weights {
        Weights::zeros(
            self.encoder.input_dim(),
            self.decoder.input_dim(),
            self.encoder.hidden_dim(),
            self.output.rows(),
        )
    }

    /// Every tensor with a stable dotted name, in checkpoint order.
    pub fn tensors(&self) -> Vec<(String, &Matrix)> {
        let mut out = Vec::new();
        for (gate, p) in self.encoder.gates() {
            for (part, m) in ["input", "recurrent", "bias"].into_iter().zip(p.matrices()) {
                out.push((format!("encoder.{gate}.{part}"), m));
            }
        }
        for (gate, p) in self.decoder.gates() {
            for (part, m) in ["input", "recurrent", "bias"].into_iter().zip(p.matrices()) {
                out.push((format!("decoder.{gate}.{part}"), m));
            }
        }
        out.push(("output".to_string(), &self.output));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        let mut out = Vec::new();
        for (gate, p) in self.encoder.gates_mut() {
            for (part, m) in ["input", "recurrent", "bias"].into_iter().zip(p.matrices_mut()) {
                out.push((format!("encoder.{gate}.{part}"), m));
            }
        }
        for (gate, p) in self.decoder.gates_mut() {
            for (part, m) in ["input", "recurrent", "bias"].into_iter().zip(p.matrices_mut()) {
                out.push((format!("decoder.{gate}.{part}"), m));
            }
        }
        out.push(("output".to_string(), &mut self.output));
        out
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn axpy(&mut self, scale: f64, other: &Weights) {
        for ((_, a), (_, b)) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.axpy(scale, b);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for (_, m) in self.tensors_mut() {
            m.scale(s);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|(_, m)| m.is_finite())
    }
}

/// A full captioner: trainable weights plus the frozen vocabulary and embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq2SeqParams {
    weights: Weights,
    embeddings: EmbeddingTable,
    vocab: Vocabulary,
}

impl Seq2SeqParams {
    pub fn new(weights: Weights, embeddings: EmbeddingTable, vocab: Vocabulary) -> Result<Seq2SeqParams, ModelError> {
        let hidden = weights.encoder.hidden_dim();
        if weights.decoder.hidden_dim() != hidden {
            return Err(ModelError::Shape(format!(
                "encoder hidden size {hidden} differs from decoder hidden size {}",
                weights.decoder.hidden_dim()
            )));
        }
        if weights.decoder.input_dim() != embeddings.dim() {
            return Err(ModelError::Shape(format!(
                "decoder input size {} differs from embedding size {}",
                weights.decoder.input_dim(),
                embeddings.dim()
            )));
        }
        if embeddings.len() != vocab.len() {
            return Err(ModelError::Shape(format!(
                "{} embeddings for {} vocabulary words",
                embeddings.len(),
                vocab.len()
            )));
        }
        if weights.output.shape() != (vocab.len(), hidden) {
            return Err(ModelError::Shape(format!(
                "output projection is {:?}, expected {:?}",
                weights.output.shape(),
                (vocab.len(), hidden)
            )));
        }
        Ok(Seq2SeqParams {
            weights,
            embeddings,
            vocab,
        })
    }

    /// Seeded uniform initialization.
    pub fn init(
        vocab: Vocabulary,
        embeddings: EmbeddingTable,
        feature_dim: usize,
        hidden_dim: usize,
        seed: u64,
    ) -> Seq2SeqParams {
        let weights = Weights::uniform(feature_dim, embeddings.dim(), hidden_dim, vocab.len(), seed);
        Seq2SeqParams::new(weights, embeddings, vocab).expect("shapes are consistent by construction")
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// Mutable access to tensor values. Shapes cannot change through it.
    pub fn tensors_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        self.weights.tensors_mut()
    }

    pub fn embeddings(&self) -> &EmbeddingTable {
        &self.embeddings
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn feature_dim(&self) -> usize {
        self.weights.encoder.input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.weights.encoder.hidden_dim()
    }

    pub(crate) fn apply_update(&mut self, lr: f64, grads: &Weights) {
        self.weights.axpy(-lr, grads);
    }

    pub(crate) fn check_features(&self, features: &[Vec<f64>]) -> Result<(), ModelError> {
        match features.iter().find(|f| f.len() != self.feature_dim()) {
            Some(f) => Err(ModelError::Shape(format!(
                "feature vector has length {}, model expects {}",
                f.len(),
                self.feature_dim()
            ))),
            None => Ok(()),
        }
    }

    /// Runs the encoder from a zero state and returns every step.
    fn encode(&self, features: &[Vec<f64>]) -> Vec<LstmStepCache> {
        let mut state = EncoderState::zeros(self.hidden_dim());
        let mut steps = Vec::with_capacity(features.len());
        for x in features {
            let step = lstm::step_cached(&self.weights.encoder, x, &state);
            state = step.next.clone();
            steps.push(step);
        }
        steps
    }

    /// Summary vector `v`: the encoder's final output.
    pub fn summary_vector(&self, features: &FeatureSequence) -> Result<Vec<f64>, ModelError> {
        let feats = features.to_f64();
        self.check_features(&feats)?;
        Ok(self
            .encode(&feats)
            .last()
            .map(|s| s.next.h.clone())
            .unwrap_or_else(|| vec![0.0; self.hidden_dim()]))
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        self.weights.output.mul_vec(h)
    }

    pub(crate) fn forward_ids(&self, features: &[Vec<f64>], ids: &[usize]) -> (f64, ForwardCache) {
        let encoder = self.encode(features);
        let mut h = encoder
            .last()
            .map(|s| s.next.h.clone())
            .unwrap_or_else(|| vec![0.0; self.hidden_dim()]);
        let steps = ids.len() - 1;
        let mut decoder = Vec::with_capacity(steps);
        let mut probs = Vec::with_capacity(steps);
        let mut loss = 0.0;
        for l in 0..steps {
            let step = gru::step_cached(&self.weights.decoder, self.embeddings.vector(ids[l]), &h);
            h = step.next.clone();
            let p = softmax(&self.logits(&h));
            loss -= p[ids[l + 1]].ln();
            probs.push(p);
            decoder.push(step);
        }
        let cache = ForwardCache {
            encoder,
            decoder,
            probs,
            targets: ids[1..].to_vec(),
        };
        (loss / steps as f64, cache)
    }

    /// Gradients of the averaged loss w.r.t. every trainable tensor.
    pub fn backward(&self, cache: &ForwardCache) -> Weights {
        let mut grads = self.weights.zeros_like();
        let n = self.hidden_dim();
        let steps = cache.decoder.len() as f64;
        let mut carry = vec![0.0; n];
        for l in (0..cache.decoder.len()).rev() {
            let mut dlogits = cache.probs[l].clone();
            dlogits[cache.targets[l]] -= 1.0;
            dlogits.iter_mut().for_each(|d| *d /= steps);
            let h = &cache.decoder[l].next;
            grads.output.add_outer(&dlogits, h);
            let mut dh = carry;
            self.weights.output.mul_t_vec_add(&dlogits, &mut dh);
            carry = gru::step_backward(&self.weights.decoder, &cache.decoder[l], &dh, &mut grads.decoder);
        }
        let mut dh = carry;
        let mut dc = vec![0.0; n];
        for step in cache.encoder.iter().rev() {
            (dh, dc) = lstm::step_backward(&self.weights.encoder, step, &dh, &dc, &mut grads.encoder);
        }
        grads
    }

    pub(crate) fn target_ids(&self, target: &TokenizedSentence) -> Result<Vec<usize>, ModelError> {
        if !target.is_tagged() {
            return Err(ModelError::Vocab("target sentence must carry BOS/EOS tags".to_string()));
        }
        self.vocab.encode(target).map_err(|e| ModelError::Vocab(e.to_string()))
    }

    /// Mean negative log-likelihood of the tagged `target` under teacher forcing.
    pub fn forward_loss(
        &self,
        features: &FeatureSequence,
        target: &TokenizedSentence,
    ) -> Result<(f64, ForwardCache), ModelError> {
        let ids = self.target_ids(target)?;
        let feats = features.to_f64();
        self.check_features(&feats)?;
        Ok(self.forward_ids(&feats, &ids))
    }

    pub(crate) fn decode_ids(&self, features: &[Vec<f64>], max_len: usize) -> Vec<usize> {
        let mut h = self
            .encode(features)
            .last()
            .map(|s| s.next.h.clone())
            .unwrap_or_else(|| vec![0.0; self.hidden_dim()]);
        let mut token = self.vocab.bos_id();
        let mut out = Vec::new();
        for _ in 0..max_len {
            h = gru::step_cached(&self.weights.decoder, self.embeddings.vector(token), &h).next;
            let logits = self.logits(&h);
            // first maximum wins, so ties go to the smallest id
            let mut best = 0;
            for (i, &v) in logits.iter().enumerate() {
                if v > logits[best] {
                    best = i;
                }
            }
            if best == self.vocab.eos_id() {
                break;
            }
            out.push(best);
            token = best;
        }
        out
    }

    /// Greedy decoding from the BOS tag until EOS or `max_len` words.
    pub fn greedy_decode(&self, features: &FeatureSequence, max_len: usize) -> Result<TokenizedSentence, ModelError> {
        let feats = features.to_f64();
        self.check_features(&feats)?;
        let ids = self.decode_ids(&feats, max_len.max(1));
        Ok(TokenizedSentence::from_words(
            ids.iter().map(|&i| self.vocab.word(i).unwrap_or_default().to_string()),
        ))
    }
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    encoder: Vec<LstmStepCache>,
    decoder: Vec<GruStepCache>,
    probs: Vec<Vec<f64>>,
    targets: Vec<usize>,
}

impl ForwardCache {
    /// Softmax output at each predicted position.
    pub fn probabilities(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn summary_vector(&self) -> Option<&[f64]> {
        self.encoder.last().map(|s| s.next.h.as_slice())
    }
}

pub fn forward_loss(
    params: &Seq2SeqParams,
    features: &FeatureSequence,
    target: &TokenizedSentence,
) -> Result<(f64, ForwardCache), ModelError> {
    params.forward_loss(features, target)
}

pub fn backward(params: &Seq2SeqParams, cache: &ForwardCache) -> Weights {
    params.backward(cache)
}

pub fn greedy_decode(
    params: &Seq2SeqParams,
    features: &FeatureSequence,
    max_len: usize,
) -> Result<TokenizedSentence, ModelError> {
    params.greedy_decode(features, max_len)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn sentence(words: &[&str]) -> TokenizedSentence {
        TokenizedSentence::from_words(words.iter().copied()).tagged()
    }

    #[test]
    fn zero_projection_gives_log_vocab_size() {
        let mut m = model(&["a", "man", "runs"], 3, 2, 4, 1);
        for (name, t) in m.tensors_mut() {
            if name == "output" {
                t.data_mut().fill(0.0);
            }
        }
        let (loss, cache) = m
            .forward_loss(&features("v", 3, 3, 2), &sentence(&["a", "man", "runs"]))
            .unwrap();
        assert_eq!(loss, (5f64).ln());
        assert_eq!(cache.probabilities().len(), 4);
    }

    #[test]
    fn tags_only_is_a_single_step() {
        let m = model(&["dog"], 2, 2, 3, 5);
        let feats = features("v", 2, 2, 1);
        let (loss, cache) = m.forward_loss(&feats, &sentence(&[])).unwrap();
        assert_eq!(cache.probabilities().len(), 1);
        assert_eq!(loss, -cache.probabilities()[0][m.vocab().eos_id()].ln());
    }

    #[test]
    fn errors() {
        let m = model(&["dog"], 2, 2, 3, 5);
        let feats = features("v", 2, 2, 1);
        assert!(matches!(
            m.forward_loss(&feats, &sentence(&["cat"])),
            Err(ModelError::Vocab(_))
        ));
        assert!(matches!(
            m.forward_loss(&feats, &TokenizedSentence::from_words(["dog"])),
            Err(ModelError::Vocab(_))
        ));
        assert!(matches!(
            m.forward_loss(&features("v", 2, 3, 1), &sentence(&["dog"])),
            Err(ModelError::Shape(_))
        ));
    }

    #[test]
    fn frame_order_matters() {
        let m = model(&["dog"], 3, 2, 4, 8);
        let feats = features("v", 4, 3, 3);
        let mut rev = feats.vectors().to_vec();
        rev.reverse();
        let reversed = FeatureSequence::new("v", rev).unwrap();
        assert_ne!(m.summary_vector(&feats).unwrap(), m.summary_vector(&reversed).unwrap());
    }

    #[test]
    fn all_zero_decodes_id_zero_until_max_len() {
        let vocab = vocab(&["a", "b"]);
        let emb = EmbeddingTable::random(&vocab, 2, 0);
        let m = Seq2SeqParams::new(Weights::zeros(3, 2, 4, vocab.len()), emb, vocab).unwrap();
        let out = m.decode_ids(&features("v", 2, 3, 0).to_f64(), 7);
        assert_eq!(out, vec![0; 7]);
    }

    #[test]
    fn dominant_eos_decodes_empty() {
        let vocab = vocab(&["a", "b"]);
        let emb = EmbeddingTable::random(&vocab, 2, 0);
        let mut w = Weights::zeros(3, 2, 4, vocab.len());
        // push the hidden state positive and make EOS read it
        w.decoder.update.bias.data_mut().fill(10.0);
        w.decoder.candidate.bias.data_mut().fill(10.0);
        for c in 0..4 {
            w.output.set(1, c, 5.0);
        }
        let m = Seq2SeqParams::new(w, emb, vocab).unwrap();
        let out = m.greedy_decode(&features("v", 2, 3, 0), 30).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn gradients_are_finite_and_mean_reduced() {
        let m = model(&["a", "dog", "runs"], 3, 2, 4, 11);
        let feats = features("v", 3, 3, 4);
        let (_, cache) = m.forward_loss(&feats, &sentence(&["a", "dog"])).unwrap();
        let g = m.backward(&cache);
        assert!(g.is_finite());
        let mut doubled = g.clone();
        doubled.axpy(1.0, &g);
        doubled.scale(0.5);
        assert_eq!(doubled, g);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let vocab = vocab(&["a"]);
        let emb = EmbeddingTable::random(&vocab, 2, 0);
        let w = Weights::zeros(3, 3, 4, vocab.len());
        assert!(matches!(Seq2SeqParams::new(w, emb, vocab), Err(ModelError::Shape(_))));
    }
}
