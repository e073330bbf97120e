mod common;

use capkit::metrics::meteor::align;
use capkit::metrics::rouge::lcs_len;
use capkit::metrics::{bleu4_corpus, cider_corpus, meteor, BleuStats, MeteorOptions, ScoredPair, SynonymTable};
use common::metrics::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pairs(seed: u64, count: usize) -> Vec<ScoredPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_pair(&mut rng, &format!("v{i}"))).collect()
}

#[test]
fn lcs_matches_subsequence_enumeration() {
    for p in pairs(1, 200) {
        for r in p.references() {
            let (c, r) = (p.candidate().words(), r.words());
            assert_eq!(lcs_len(c, r), brute_lcs(c, r), "{c:?} / {r:?}");
        }
    }
}

#[test]
fn bleu_counts_match_nested_loops() {
    let all = pairs(2, 200);
    for p in &all {
        let refs: Vec<&[String]> = p.references().iter().map(|s| s.words()).collect();
        let stats = BleuStats::of_pair(p);
        let (m, t) = bleu_counts(p.candidate().words(), &refs);
        assert_eq!(stats.matches, m);
        assert_eq!(stats.totals, t);
        assert_eq!(stats.reference_len, closest_ref_len(p.candidate().words().len(), &refs));
    }
    for chunk in all.chunks(20) {
        assert!((bleu4_corpus(chunk, false) - bleu_corpus(chunk)).abs() < 1e-9);
    }
}

#[test]
fn cider_matches_dense_tfidf() {
    for chunk in pairs(3, 200).chunks(20) {
        let got = cider_corpus(chunk);
        let want = cider_dense(chunk);
        for ((id, g), w) in got.per_video.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{id}: {g} vs {w}");
        }
    }
}

#[test]
fn meteor_alignment_matches_exhaustive_search() {
    let table = SynonymTable::parse("cat dog\njumps runs\n");
    let variants = [(false, None), (true, None), (true, Some(&table)), (false, Some(&table))];
    for (seed, (stem, synonyms)) in variants.into_iter().enumerate() {
        let opts = MeteorOptions { stem, synonyms };
        for p in pairs(10 + seed as u64, 200) {
            let c = p.candidate().words();
            for r in p.references() {
                let a = align(c, r.words(), &opts);
                assert_eq!(
                    (a.matches, a.chunks),
                    meteor_alignment(c, r.words(), stem, synonyms),
                    "{c:?} / {:?}",
                    r.words()
                );
            }
            assert!((meteor(&p, &opts) - meteor_score(&p, stem, synonyms)).abs() < 1e-9);
        }
    }
}
