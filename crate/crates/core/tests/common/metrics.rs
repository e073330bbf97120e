//! Brute-force metric oracles. Each one favours obviousness over speed and
//! shares no code with the library beyond the Porter stemmer.

use capkit::metrics::{ScoredPair, SynonymTable};
use capkit::stem::porter_stem;
use capkit::text::TokenizedSentence;
use rand::seq::IndexedRandom;
use rand::Rng;

/// Words chosen so that several pairs collapse under stemming.
pub const WORDS: [&str; 10] = [
    "dog", "dogs", "run", "runs", "running", "a", "the", "cat", "jumps", "jumping",
];

pub fn sentence(words: &[&str]) -> TokenizedSentence {
    TokenizedSentence::from_words(words.iter().copied())
}

pub fn random_words(rng: &mut impl Rng, vocab: &[&'static str], max_len: usize) -> Vec<&'static str> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| *vocab.choose(rng).unwrap()).collect()
}

/// A pair with at most 8 tokens per sentence drawn from a vocabulary of at
/// most 10 words, and 1 to 3 references.
pub fn random_pair(rng: &mut impl Rng, id: &str) -> ScoredPair {
    let vocab_size = rng.random_range(2..=WORDS.len());
    let vocab = &WORDS[..vocab_size];
    let cand = sentence(&random_words(rng, vocab, 8));
    let refs = (0..rng.random_range(1..=3))
        .map(|_| sentence(&random_words(rng, vocab, 8)))
        .collect();
    ScoredPair::new(id, cand, refs).unwrap()
}

/// LCS length by trying every subsequence of `a`.
pub fn brute_lcs(a: &[String], b: &[String]) -> usize {
    assert!(a.len() <= 16);
    let mut best = 0;
    for mask in 0u32..(1 << a.len()) {
        let picked: Vec<&String> = (0..a.len()).filter(|i| mask & (1 << i) != 0).map(|i| &a[i]).collect();
        let mut k = 0;
        for w in b {
            if k < picked.len() && picked[k] == w {
                k += 1;
            }
        }
        if k == picked.len() {
            best = best.max(picked.len());
        }
    }
    best
}

fn occurrences(sentence: &[String], gram: &[String]) -> usize {
    let n = gram.len();
    if sentence.len() < n {
        return 0;
    }
    (0..=sentence.len() - n)
        .filter(|&i| &sentence[i..i + n] == gram)
        .count()
}

/// Clipped matches and candidate totals per order, counted with nested loops.
pub fn bleu_counts(cand: &[String], refs: &[&[String]]) -> ([usize; 4], [usize; 4]) {
    let mut matches = [0; 4];
    let mut totals = [0; 4];
    for n in 1..=4 {
        if cand.len() < n {
            continue;
        }
        totals[n - 1] = cand.len() - n + 1;
        for i in 0..=cand.len() - n {
            let gram = &cand[i..i + n];
            let seen_before = (0..i).any(|k| &cand[k..k + n] == gram);
            if seen_before {
                continue;
            }
            let mine = occurrences(cand, gram);
            let cap = refs.iter().map(|r| occurrences(r, gram)).max().unwrap_or(0);
            matches[n - 1] += mine.min(cap);
        }
    }
    (matches, totals)
}

/// Closest reference length, the shorter one on a tie.
pub fn closest_ref_len(cand_len: usize, refs: &[&[String]]) -> usize {
    let mut best = refs[0].len();
    for r in refs {
        let d = r.len().abs_diff(cand_len);
        let bd = best.abs_diff(cand_len);
        if d < bd || (d == bd && r.len() < best) {
            best = r.len();
        }
    }
    best
}

/// Unsmoothed corpus BLEU-4 from nested-loop counts.
pub fn bleu_corpus(pairs: &[ScoredPair]) -> f64 {
    let (mut m, mut t, mut c, mut r) = ([0usize; 4], [0usize; 4], 0usize, 0usize);
    for p in pairs {
        let refs: Vec<&[String]> = p.references().iter().map(|s| s.words()).collect();
        let (pm, pt) = bleu_counts(p.candidate().words(), &refs);
        for n in 0..4 {
            m[n] += pm[n];
            t[n] += pt[n];
        }
        c += p.candidate().words().len();
        r += closest_ref_len(p.candidate().words().len(), &refs);
    }
    if m.contains(&0) {
        return 0.0;
    }
    let log_p: f64 = (0..4).map(|n| (m[n] as f64 / t[n] as f64).ln()).sum::<f64>() / 4.0;
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    100.0 * bp * log_p.exp()
}

/// CIDEr with every sentence turned into a dense TF-IDF vector over the
/// list of all n-grams occurring anywhere in the corpus.
pub fn cider_dense(pairs: &[ScoredPair]) -> Vec<f64> {
    let n_docs = pairs.len() as f64;
    let mut scores = vec![0.0; pairs.len()];
    for n in 1..=4 {
        let mut index: Vec<Vec<String>> = Vec::new();
        for p in pairs {
            for s in std::iter::once(p.candidate()).chain(p.references()) {
                let w = s.words();
                for i in 0..w.len().saturating_sub(n - 1) {
                    let g = w[i..i + n].to_vec();
                    if !index.contains(&g) {
                        index.push(g);
                    }
                }
            }
        }
        let df: Vec<usize> = index
            .iter()
            .map(|g| {
                pairs
                    .iter()
                    .filter(|p| p.references().iter().any(|r| occurrences(r.words(), g) > 0))
                    .count()
            })
            .collect();
        let dense = |w: &[String]| -> Vec<f64> {
            let total = w.len().saturating_sub(n - 1);
            index
                .iter()
                .zip(&df)
                .map(|(g, &d)| {
                    if total == 0 {
                        return 0.0;
                    }
                    let tf = occurrences(w, g) as f64 / total as f64;
                    tf * (n_docs.ln() - (d.max(1) as f64).ln())
                })
                .collect()
        };
        let cos = |a: &[f64], b: &[f64]| -> f64 {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if na == 0.0 || nb == 0.0 {
                0.0
            } else {
                dot / (na * nb)
            }
        };
        for (k, p) in pairs.iter().enumerate() {
            let cv = dense(p.candidate().words());
            let mean: f64 =
                p.references().iter().map(|r| cos(&cv, &dense(r.words()))).sum::<f64>() / p.references().len() as f64;
            scores[k] += mean;
        }
    }
    scores.iter().map(|s| (1000.0 * s / 4.0).clamp(0.0, 1000.0)).collect()
}

pub fn chunks_of(links: &[Option<usize>]) -> usize {
    let mut chunks = 0;
    for i in 0..links.len() {
        if let Some(j) = links[i] {
            let continues = i > 0 && matches!(links[i - 1], Some(p) if p + 1 == j);
            if !continues {
                chunks += 1;
            }
        }
    }
    chunks
}

/// Every one-to-one partial alignment, each link labelled with the first
/// stage it passes. Keeps the lexicographically largest per-stage match
/// counts, then the fewest chunks.
fn enumerate(
    i: usize,
    links: &mut Vec<Option<usize>>,
    counts: &mut Vec<usize>,
    used: &mut Vec<bool>,
    stage_of: &dyn Fn(usize, usize) -> Option<usize>,
    best: &mut Option<(Vec<usize>, usize)>,
) {
    if i == links.len() {
        let c = chunks_of(links);
        let better = match best {
            None => true,
            Some((bc, bk)) => *counts > *bc || (counts == bc && c < *bk),
        };
        if better {
            *best = Some((counts.clone(), c));
        }
        return;
    }
    enumerate(i + 1, links, counts, used, stage_of, best);
    for j in 0..used.len() {
        if let (false, Some(s)) = (used[j], stage_of(i, j)) {
            used[j] = true;
            links[i] = Some(j);
            counts[s] += 1;
            enumerate(i + 1, links, counts, used, stage_of, best);
            counts[s] -= 1;
            links[i] = None;
            used[j] = false;
        }
    }
}

/// Exhaustive alignment over exact words, optionally Porter stems, then an
/// optional synonym table. Returns `(matches, chunks)`.
pub fn meteor_alignment(
    cand: &[String],
    reference: &[String],
    stem: bool,
    synonyms: Option<&SynonymTable>,
) -> (usize, usize) {
    let cs: Vec<String> = cand.iter().map(|w| porter_stem(w)).collect();
    let rs: Vec<String> = reference.iter().map(|w| porter_stem(w)).collect();
    let mut tests: Vec<Box<dyn Fn(usize, usize) -> bool + '_>> = vec![Box::new(|i, j| cand[i] == reference[j])];
    if stem {
        tests.push(Box::new(|i, j| cs[i] == rs[j]));
    }
    if let Some(t) = synonyms {
        tests.push(Box::new(move |i, j| t.are_synonyms(&cand[i], &reference[j])));
    }
    let stage_of = |i: usize, j: usize| tests.iter().position(|t| t(i, j));
    let mut best = None;
    enumerate(
        0,
        &mut vec![None; cand.len()],
        &mut vec![0; tests.len()],
        &mut vec![false; reference.len()],
        &stage_of,
        &mut best,
    );
    let (counts, chunks) = best.unwrap();
    (counts.iter().sum(), chunks)
}

/// METEOR in [0, 100], best over references, from the exhaustive alignment.
pub fn meteor_score(pair: &ScoredPair, stem: bool, synonyms: Option<&SynonymTable>) -> f64 {
    let cand = pair.candidate().words();
    let mut best: f64 = 0.0;
    for r in pair.references() {
        let r = r.words();
        let (m, ch) = meteor_alignment(cand, r, stem, synonyms);
        if m == 0 {
            continue;
        }
        let p = m as f64 / cand.len() as f64;
        let rec = m as f64 / r.len() as f64;
        let f = p * rec / (0.9 * p + 0.1 * rec);
        let pen = 0.5 * (ch as f64 / m as f64).powi(3);
        best = best.max(f * (1.0 - pen));
    }
    100.0 * best
}
