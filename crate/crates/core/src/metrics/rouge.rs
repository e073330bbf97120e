use super::ScoredPair;

pub const DEFAULT_BETA: f64 = 1.2;

/// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// F-measure of LCS precision and recall; 0 when both vanish.
pub fn lcs_f_measure(lcs: usize, cand_len: usize, ref_len: usize, beta: f64) -> f64 {
    if lcs == 0 || cand_len == 0 || ref_len == 0 {
        return 0.0;
    }
    let p = lcs as f64 / cand_len as f64;
    let r = lcs as f64 / ref_len as f64;
    let b2 = beta * beta;
    (1.0 + b2) * p * r / (r + b2 * p)
}

/// ROUGE-L in [0, 100], best F-measure over the references.
pub fn rouge_l(pair: &ScoredPair, beta: f64) -> f64 {
    let cand = pair.candidate.words();
    let best = pair
        .references
        .iter()
        .map(|r| {
            let r = r.words();
            lcs_f_measure(lcs_len(cand, r), cand.len(), r.len(), beta)
        })
        .fold(0.0, f64::max);
    100.0 * best
}
