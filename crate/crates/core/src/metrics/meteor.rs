//! METEOR with staged unigram alignment (exact, Porter stem, synonym) and
//! the fragmentation penalty.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::ScoredPair;
use crate::stem::porter_stem;

/// Upper bound on alignment search nodes. Only adversarial inputs
/// with long runs of repeated tokens come near it.
const NODE_BUDGET: usize = 2_000_000;

/// Groups of interchangeable words, one group per line of the source file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    groups: HashMap<String, Vec<usize>>,
    n_groups: usize,
}

impl SynonymTable {
    pub fn parse(text: &str) -> SynonymTable {
        let mut table = SynonymTable::default();
        for line in text.lines() {
            let words: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
            if words.len() < 2 {
                continue;
            }
            let id = table.n_groups;
            table.n_groups += 1;
            for w in words {
                let ids = table.groups.entry(w).or_default();
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
        }
        table
    }

    pub fn load(path: &Path) -> std::io::Result<SynonymTable> {
        Ok(SynonymTable::parse(&fs::read_to_string(path)?))
    }

    pub fn is_empty(&self) -> bool {
        self.n_groups == 0
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        match (self.groups.get(a), self.groups.get(b)) {
            (Some(ga), Some(gb)) => ga.iter().any(|g| gb.contains(g)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeteorOptions<'a> {
    pub stem: bool,
    pub synonyms: Option<&'a SynonymTable>,
}

/// Result of aligning one candidate against one reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// `links[i]` is the reference position matched to candidate token `i`.
    pub links: Vec<Option<usize>>,
    pub matches: usize,
    pub chunks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Exact,
    Stem,
    Synonym,
}

/// Number of maximal runs of links that are adjacent in both sentences.
pub fn count_chunks(links: &[Option<usize>]) -> usize {
    let mut chunks = 0;
    let mut prev: Option<usize> = None;
    for link in links {
        match link {
            Some(j) => {
                if prev.is_none_or(|p| p + 1 != *j) {
                    chunks += 1;
                }
                prev = Some(*j);
            }
            None => prev = None,
        }
    }
    chunks
}

struct AlignSearch {
    /// Per candidate token: `(reference position, stage index)`, best stage first.
    edges: Vec<Vec<(usize, usize)>>,
    links: Vec<Option<usize>>,
    ref_used: Vec<bool>,
    counts: Vec<usize>,
    best: Option<(Vec<usize>, usize, Vec<Option<usize>>)>,
    nodes: usize,
}

impl AlignSearch {
    /// Per-stage upper bound on the match counts reachable from position `from`.
    fn bound(&self, from: usize) -> Vec<usize> {
        let stages = self.counts.len();
        let mut positions = vec![0; stages];
        let mut refs = vec![vec![false; self.ref_used.len()]; stages];
        for i in from..self.links.len() {
            let mut seen = vec![false; stages];
            for &(j, s) in &self.edges[i] {
                if !self.ref_used[j] {
                    seen[s] = true;
                    refs[s][j] = true;
                }
            }
            for s in 0..stages {
                positions[s] += usize::from(seen[s]);
            }
        }
        (0..stages)
            .map(|s| self.counts[s] + positions[s].min(refs[s].iter().filter(|r| **r).count()))
            .collect()
    }

    fn run(&mut self, i: usize, chunks: usize, prev: Option<usize>) {
        self.nodes += 1;
        if i == self.links.len() {
            let better = match &self.best {
                None => true,
                Some((bc, bk, _)) => self.counts > *bc || (self.counts == *bc && chunks < *bk),
            };
            if better {
                self.best = Some((self.counts.clone(), chunks, self.links.clone()));
            }
            return;
        }
        if let Some((bc, bk, _)) = &self.best {
            let bound = self.bound(i);
            if bound < *bc || (bound == *bc && chunks >= *bk) || self.nodes > NODE_BUDGET {
                return;
            }
        }
        let mut order: Vec<(usize, usize)> = self.edges[i]
            .iter()
            .copied()
            .filter(|&(j, _)| !self.ref_used[j])
            .collect();
        if let Some(p) = prev {
            if let Some(pos) = order.iter().position(|&(j, _)| j == p + 1) {
                let e = order.remove(pos);
                order.insert(0, e);
            }
        }
        for (j, s) in order {
            let opens = usize::from(prev.is_none_or(|p| p + 1 != j));
            self.ref_used[j] = true;
            self.links[i] = Some(j);
            self.counts[s] += 1;
            self.run(i + 1, chunks + opens, Some(j));
            self.counts[s] -= 1;
            self.links[i] = None;
            self.ref_used[j] = false;
        }
        self.run(i + 1, chunks, None);
    }
}

fn stage_matches(stage: Stage, c: &str, r: &str, cs: &str, rs: &str, opts: &MeteorOptions) -> bool {
    match stage {
        Stage::Exact => c == r,
        Stage::Stem => cs == rs,
        Stage::Synonym => opts.synonyms.is_some_and(|t| t.are_synonyms(c, r)),
    }
}

/// Aligns candidate and reference tokens one-to-one. Each link belongs to
/// the first stage whose test it passes. The alignment maximizes the exact
/// match count, then the stem match count, then the synonym match count,
/// and among those minimizes the chunk count.
pub fn align(cand: &[String], reference: &[String], opts: &MeteorOptions) -> Alignment {
    let mut stages = vec![Stage::Exact];
    if opts.stem {
        stages.push(Stage::Stem);
    }
    if opts.synonyms.is_some_and(|t| !t.is_empty()) {
        stages.push(Stage::Synonym);
    }
    let stem_of = |ws: &[String]| -> Vec<String> {
        if opts.stem {
            ws.iter().map(|w| porter_stem(w)).collect()
        } else {
            ws.to_vec()
        }
    };
    let cand_stems = stem_of(cand);
    let ref_stems = stem_of(reference);

    let edges: Vec<Vec<(usize, usize)>> = (0..cand.len())
        .map(|i| {
            let mut e: Vec<(usize, usize)> = (0..reference.len())
                .filter_map(|j| {
                    stages
                        .iter()
                        .position(|&st| stage_matches(st, &cand[i], &reference[j], &cand_stems[i], &ref_stems[j], opts))
                        .map(|s| (j, s))
                })
                .collect();
            e.sort_by_key(|&(j, s)| (s, j));
            e
        })
        .collect();
    let mut search = AlignSearch {
        edges,
        links: vec![None; cand.len()],
        ref_used: vec![false; reference.len()],
        counts: vec![0; stages.len()],
        best: None,
        nodes: 0,
    };
    search.run(0, 0, None);
    let (_, _, links) = search.best.expect("search visits at least one leaf");
    let matches = links.iter().filter(|l| l.is_some()).count();
    let chunks = count_chunks(&links);
    Alignment { links, matches, chunks }
}

/// METEOR score in [0, 1] from alignment counts.
pub fn meteor_from_counts(matches: usize, chunks: usize, cand_len: usize, ref_len: usize) -> f64 {
    if matches == 0 || cand_len == 0 || ref_len == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let p = m / cand_len as f64;
    let r = m / ref_len as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let penalty = 0.5 * (chunks as f64 / m).powi(3);
    fmean * (1.0 - penalty)
}

/// METEOR in [0, 100], best over the references.
pub fn meteor(pair: &ScoredPair, opts: &MeteorOptions) -> f64 {
    let cand = pair.candidate.words();
    let best = pair
        .references
        .iter()
        .map(|r| {
            let r = r.words();
            let a = align(cand, r, opts);
            meteor_from_counts(a.matches, a.chunks, cand.len(), r.len())
        })
        .fold(0.0, f64::max);
    100.0 * best
}
