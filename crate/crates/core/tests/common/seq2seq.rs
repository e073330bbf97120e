use capkit::augment::FrameImage;
use capkit::features::{stub_extract, FeatureSequence, VideoFrames};
use capkit::seq2seq::{sgd_train, Seq2SeqParams, TrainConfig, TrainingLog};
use capkit::text::{build_vocab, tokenize, EmbeddingTable, TokenizedSentence};

pub const MEMO_CAPTIONS: [&str; 5] = [
    "a man is slicing bread",
    "a cat is playing the piano",
    "a woman rides a horse on the beach",
    "two dogs are running",
    "a boy is swimming in a pool",
];

/// Video `i`: ten 8x8 frames whose quadrants cycle through a palette of
/// eight saturated colors, so every video has a distinct stub descriptor.
pub fn synthetic_video(i: usize) -> VideoFrames {
    let palette = [
        [0, 0, 0],
        [255, 0, 0],
        [0, 255, 0],
        [0, 0, 255],
        [255, 255, 0],
        [255, 0, 255],
        [0, 255, 255],
        [255, 255, 255],
    ];
    let frames = (0..10)
        .map(|t| {
            FrameImage::from_fn(8, 8, |x, y| {
                let q = (x / 4) + 2 * (y / 4);
                palette[(i + 3 * q + t / 5) % 8]
            })
        })
        .collect();
    VideoFrames::new(format!("video{i}"), frames).unwrap()
}

pub struct Memorization {
    pub initial: Seq2SeqParams,
    pub train: Vec<(FeatureSequence, TokenizedSentence)>,
    pub val: Vec<(FeatureSequence, Vec<TokenizedSentence>)>,
}

pub fn memorization_setup(hidden: usize) -> Memorization {
    let captions: Vec<TokenizedSentence> = MEMO_CAPTIONS.iter().map(|c| tokenize(c, false).unwrap()).collect();
    let tagged: Vec<TokenizedSentence> = captions.iter().map(|c| c.tagged()).collect();
    let vocab = build_vocab(&tagged);
    let embeddings = EmbeddingTable::random(&vocab, 32, 7);
    let feats: Vec<FeatureSequence> = (0..5).map(|i| stub_extract(&synthetic_video(i), 5, 32)).collect();
    let initial = Seq2SeqParams::init(vocab, embeddings, 32, hidden, 1);
    let train = feats.iter().cloned().zip(captions.iter().cloned()).collect();
    let val = feats.into_iter().zip(captions.into_iter().map(|c| vec![c])).collect();
    Memorization { initial, train, val }
}

pub fn memorize() -> (Seq2SeqParams, TrainingLog, Memorization) {
    let setup = memorization_setup(32);
    let config = TrainConfig {
        lr: 0.1,
        batch_size: 1,
        patience: 500,
        max_epochs: 500,
        seed: 3,
        ..TrainConfig::default()
    };
    let (best, log) = sgd_train(setup.initial.clone(), &setup.train, &setup.val, &config).unwrap();
    (best, log, setup)
}

/// Straight-line LSTM step written from the cell equations with scalar loops.
pub fn oracle_lstm(p: &capkit::seq2seq::LstmParams, x: &[f64], c_prev: &[f64], h_prev: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = p.hidden_dim();
    let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
    let affine = |g: &capkit::seq2seq::GateParams, k: usize| {
        let mut a = g.bias.get(k, 0);
        for j in 0..x.len() {
            a += g.input.get(k, j) * x[j];
        }
        for j in 0..n {
            a += g.recurrent.get(k, j) * h_prev[j];
        }
        a
    };
    let mut c = vec![0.0; n];
    let mut h = vec![0.0; n];
    for k in 0..n {
        let f = sig(affine(&p.forget, k));
        let i = sig(affine(&p.input, k));
        let o = sig(affine(&p.output, k));
        let g = affine(&p.candidate, k).tanh();
        c[k] = f * c_prev[k] + i * g;
        h[k] = o * c[k].tanh();
    }
    (c, h)
}

/// Straight-line GRU step.
pub fn oracle_gru(p: &capkit::seq2seq::GruParams, y: &[f64], h_prev: &[f64]) -> Vec<f64> {
    let n = p.hidden_dim();
    let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
    let affine = |g: &capkit::seq2seq::GateParams, k: usize, h: &[f64]| {
        let mut a = g.bias.get(k, 0);
        for j in 0..y.len() {
            a += g.input.get(k, j) * y[j];
        }
        for j in 0..n {
            a += g.recurrent.get(k, j) * h[j];
        }
        a
    };
    let r: Vec<f64> = (0..n).map(|k| sig(affine(&p.reset, k, h_prev))).collect();
    let z: Vec<f64> = (0..n).map(|k| sig(affine(&p.update, k, h_prev))).collect();
    let rh: Vec<f64> = (0..n).map(|k| r[k] * h_prev[k]).collect();
    (0..n)
        .map(|k| {
            let cand = affine(&p.candidate, k, &rh).tanh();
            (1.0 - z[k]) * h_prev[k] + z[k] * cand
        })
        .collect()
}

/// Teacher-forced loss computed as a product-of-probabilities chain.
pub fn oracle_loss(params: &Seq2SeqParams, features: &FeatureSequence, target: &TokenizedSentence) -> f64 {
    let w = params.weights();
    let n = params.hidden_dim();
    let (mut c, mut h) = (vec![0.0; n], vec![0.0; n]);
    for x in features.to_f64() {
        (c, h) = oracle_lstm(&w.encoder, &x, &c, &h);
    }
    let ids: Vec<usize> = target.tokens().iter().map(|t| params.vocab().id(t).unwrap()).collect();
    let mut log_chain = 0.0;
    for l in 0..ids.len() - 1 {
        h = oracle_gru(&w.decoder, params.embeddings().vector(ids[l]), &h);
        let logits: Vec<f64> = (0..w.output.rows())
            .map(|v| (0..n).map(|k| w.output.get(v, k) * h[k]).sum())
            .collect();
        let z: f64 = logits.iter().map(|v| v.exp()).sum();
        log_chain += (logits[ids[l + 1]].exp() / z).ln();
    }
    -log_chain / (ids.len() - 1) as f64
}

/// A small random model plus one random sample, all driven by `seed`.
pub fn random_case(seed: u64) -> (Seq2SeqParams, FeatureSequence, TokenizedSentence) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let words = ["a", "man", "dog", "runs", "eats"];
    let sentence = TokenizedSentence::from_words(words).tagged();
    let vocab = build_vocab(&[sentence]);
    let feature_dim = rng.random_range(1..=8);
    let embed_dim = rng.random_range(1..=8);
    let hidden = rng.random_range(1..=8);
    let frames = rng.random_range(1..=5);
    let target_len = rng.random_range(0..=3);
    let embeddings = EmbeddingTable::random(&vocab, embed_dim, seed);
    let mut params = Seq2SeqParams::init(vocab, embeddings, feature_dim, hidden, seed);
    // widen the weights so gates leave their linear regime
    for (_, m) in params.tensors_mut() {
        m.data_mut().iter_mut().for_each(|v| *v *= 2.0);
    }
    let feats = (0..frames)
        .map(|_| (0..feature_dim).map(|_| rng.random_range(-1.0f32..1.0)).collect())
        .collect();
    let features = FeatureSequence::new("case", feats).unwrap();
    let target =
        TokenizedSentence::from_words((0..target_len).map(|_| words[rng.random_range(0..words.len())])).tagged();
    (params, features, target)
}

pub struct GradCheck {
    pub entries: usize,
    pub worst: f64,
    pub worst_name: String,
}

/// Compares every analytic gradient entry with central differences.
pub fn gradient_check(seed: u64, step: f64) -> GradCheck {
    let (params, features, target) = random_case(seed);
    let (_, cache) = params.forward_loss(&features, &target).unwrap();
    let grads = params.backward(&cache);
    let analytic: Vec<(String, Vec<f64>)> = grads
        .tensors()
        .into_iter()
        .map(|(n, m)| (n, m.data().to_vec()))
        .collect();
    let mut out = GradCheck {
        entries: 0,
        worst: 0.0,
        worst_name: String::new(),
    };
    for (t, (name, values)) in analytic.iter().enumerate() {
        for (i, &a) in values.iter().enumerate() {
            let loss_at = |delta: f64| {
                let mut p = params.clone();
                let mut tensors = p.tensors_mut();
                tensors[t].1.data_mut()[i] += delta;
                drop(tensors);
                p.forward_loss(&features, &target).unwrap().0
            };
            let numeric = (loss_at(step) - loss_at(-step)) / (2.0 * step);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-7);
            out.entries += 1;
            if rel > out.worst {
                out.worst = rel;
                out.worst_name = format!("{name}[{i}] analytic {a:e} numeric {numeric:e}");
            }
        }
    }
    out
}
