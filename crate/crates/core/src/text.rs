//! Caption preprocessing, vocabulary construction and word embeddings.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use unicode_general_category::{get_general_category, GeneralCategory};

/// Begin-of-sequence tag. Always vocabulary id 0.
pub const BOS: &str = "<bos>";
/// End-of-sequence tag. Always vocabulary id 1.
pub const EOS: &str = "<eos>";

#[derive(Debug, Error)]
pub enum TextError {
    #[error("caption is empty after preprocessing: {0:?}")]
    EmptySentence(String),
    #[error("malformed embedding file at line {line}: {reason}")]
    MalformedEmbeddingFile { line: usize, reason: String },
    #[error("token {0:?} is not in the vocabulary")]
    UnknownToken(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A lowercased, punctuation-free caption, optionally wrapped in BOS/EOS.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenizedSentence {
    tokens: Vec<String>,
    tagged: bool,
}

impl TokenizedSentence {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_tagged(&self) -> bool {
        self.tagged
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens without the BOS/EOS wrapper.
    pub fn words(&self) -> &[String] {
        if self.tagged {
            &self.tokens[1..self.tokens.len() - 1]
        } else {
            &self.tokens
        }
    }

    pub fn untagged(&self) -> TokenizedSentence {
        TokenizedSentence {
            tokens: self.words().to_vec(),
            tagged: false,
        }
    }

    pub fn tagged(&self) -> TokenizedSentence {
        if self.tagged {
            return self.clone();
        }
        let mut tokens = Vec::with_capacity(self.tokens.len() + 2);
        tokens.push(BOS.to_string());
        tokens.extend(self.tokens.iter().cloned());
        tokens.push(EOS.to_string());
        TokenizedSentence { tokens, tagged: true }
    }

    /// Builds an untagged sentence from already-clean words. Words are
    /// taken as-is; use [`tokenize`] for raw text.
    pub fn from_words<I, S>(words: I) -> TokenizedSentence
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TokenizedSentence {
            tokens: words.into_iter().map(Into::into).collect(),
            tagged: false,
        }
    }

    /// Space-joined words, tags excluded.
    pub fn to_text(&self) -> String {
        self.words().join(" ")
    }
}

fn is_stripped(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

/// Lowercases `raw`, deletes every punctuation and symbol character, and
/// splits on whitespace runs.
pub fn tokenize(raw: &str, attach_tags: bool) -> Result<TokenizedSentence, TextError> {
    let cleaned: String = raw
        .chars()
        .filter(|c| !is_stripped(*c))
        .flat_map(char::to_lowercase)
        .collect();
    let tokens: Vec<String> = cleaned.split_whitespace().map(str::to_string).collect();
    if tokens.is_empty() {
        return Err(TextError::EmptySentence(raw.to_string()));
    }
    let sentence = TokenizedSentence { tokens, tagged: false };
    Ok(if attach_tags { sentence.tagged() } else { sentence })
}

/// Dense word ↔ id map. `<bos>` is 0 and `<eos>` is 1; every other token
/// gets the next id in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn build<'a, I>(corpus: I) -> Vocabulary
    where
        I: IntoIterator<Item = &'a TokenizedSentence>,
    {
        let mut vocab = Vocabulary {
            words: Vec::new(),
            index: HashMap::new(),
        };
        vocab.insert(BOS);
        vocab.insert(EOS);
        for sentence in corpus {
            for token in sentence.tokens() {
                vocab.insert(token);
            }
        }
        vocab
    }

    /// Rebuilds a vocabulary from an ordered word list (checkpoint loading).
    /// Returns `None` if the list is not a valid vocabulary.
    pub fn from_words(words: Vec<String>) -> Option<Vocabulary> {
        if words.len() < 2 || words[0] != BOS || words[1] != EOS {
            return None;
        }
        let mut index = HashMap::with_capacity(words.len());
        for (id, w) in words.iter().enumerate() {
            if index.insert(w.clone(), id).is_some() {
                return None;
            }
        }
        Some(Vocabulary { words, index })
    }

    fn insert(&mut self, token: &str) {
        if !self.index.contains_key(token) {
            self.index.insert(token.to_string(), self.words.len());
            self.words.push(token.to_string());
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn word(&self, id: usize) -> Option<&str> {
        self.words.get(id).map(String::as_str)
    }

    pub fn bos_id(&self) -> usize {
        0
    }

    pub fn eos_id(&self) -> usize {
        1
    }

    pub fn encode(&self, sentence: &TokenizedSentence) -> Result<Vec<usize>, TextError> {
        sentence
            .tokens()
            .iter()
            .map(|t| self.id(t).ok_or_else(|| TextError::UnknownToken(t.clone())))
            .collect()
    }
}

/// Convenience wrapper matching the operation name used across the toolkit.
///
/// Panics on an empty corpus.
pub fn build_vocab(corpus: &[TokenizedSentence]) -> Vocabulary {
    assert!(!corpus.is_empty(), "build_vocab needs a nonempty corpus");
    Vocabulary::build(corpus)
}

/// Frozen word vectors, one per vocabulary id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    oov_seed: u64,
    oov_count: usize,
}

impl EmbeddingTable {
    /// Every word gets a seeded random vector.
    pub fn random(vocab: &Vocabulary, dim: usize, oov_seed: u64) -> EmbeddingTable {
        let vectors = vocab.words().iter().map(|w| oov_vector(w, dim, oov_seed)).collect();
        EmbeddingTable {
            dim,
            vectors,
            oov_seed,
            oov_count: vocab.len(),
        }
    }

    pub fn from_vectors(vectors: Vec<Vec<f64>>, oov_seed: u64) -> Option<EmbeddingTable> {
        let dim = vectors.first()?.len();
        if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
            return None;
        }
        Some(EmbeddingTable {
            dim,
            vectors,
            oov_seed,
            oov_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn oov_seed(&self) -> u64 {
        self.oov_seed
    }

    /// How many vocabulary words were absent from the embedding file.
    pub fn oov_count(&self) -> usize {
        self.oov_count
    }

    pub fn vector(&self, id: usize) -> &[f64] {
        &self.vectors[id]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Deterministic vector for `token`, uniform in [-0.5, 0.5] per coordinate,
/// drawn from a stream keyed by `(seed, token)`.
pub fn oov_vector(token: &str, dim: usize, seed: u64) -> Vec<f64> {
    let key = seed.rotate_left(32) ^ fnv1a(token.as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    (0..dim).map(|_| rng.random_range(-0.5..=0.5)).collect()
}

/// Reads a GloVe-style text file. Words present in the file take the file
/// vector; the rest get [`oov_vector`]s. The dimension comes from the first
/// non-blank line, or `fallback_dim` when the file has none.
pub fn load_embeddings(
    path: &Path,
    vocab: &Vocabulary,
    oov_seed: u64,
    fallback_dim: usize,
) -> Result<EmbeddingTable, TextError> {
    let text = fs::read_to_string(path)?;
    parse_embeddings(&text, vocab, oov_seed, fallback_dim)
}

pub fn parse_embeddings(
    text: &str,
    vocab: &Vocabulary,
    oov_seed: u64,
    fallback_dim: usize,
) -> Result<EmbeddingTable, TextError> {
    let mut dim = None;
    let mut found: Vec<Option<Vec<f64>>> = vec![None; vocab.len()];
    for (lineno, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else {
            continue;
        };
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>().map_err(|e| TextError::MalformedEmbeddingFile {
                    line: lineno + 1,
                    reason: format!("{f:?}: {e}"),
                })
            })
            .collect::<Result<_, _>>()?;
        let expected = *dim.get_or_insert(values.len());
        if values.is_empty() || values.len() != expected {
            return Err(TextError::MalformedEmbeddingFile {
                line: lineno + 1,
                reason: format!("expected {expected} values, found {}", values.len()),
            });
        }
        if let Some(id) = vocab.id(token) {
            found[id] = Some(values);
        }
    }
    let dim = dim.unwrap_or(fallback_dim);
    let mut oov_count = 0;
    let vectors = found
        .into_iter()
        .zip(vocab.words())
        .map(|(v, w)| {
            v.unwrap_or_else(|| {
                oov_count += 1;
                oov_vector(w, dim, oov_seed)
            })
        })
        .collect();
    Ok(EmbeddingTable {
        dim,
        vectors,
        oov_seed,
        oov_count,
    })
}
