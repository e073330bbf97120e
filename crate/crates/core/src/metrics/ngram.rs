use std::collections::HashMap;

pub const MAX_ORDER: usize = 4;

pub type Ngram = Vec<String>;

/// n-gram counts of one sentence for orders 1..=4.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NgramProfile {
    orders: [HashMap<Ngram, usize>; MAX_ORDER],
}

impl NgramProfile {
    pub fn new(tokens: &[String]) -> NgramProfile {
        let mut profile = NgramProfile::default();
        for n in 1..=MAX_ORDER {
            let counts = &mut profile.orders[n - 1];
            for window in tokens.windows(n) {
                *counts.entry(window.to_vec()).or_insert(0) += 1;
            }
        }
        profile
    }

    /// Counts for order `n` (1-based).
    pub fn order(&self, n: usize) -> &HashMap<Ngram, usize> {
        &self.orders[n - 1]
    }

    pub fn count(&self, gram: &[String]) -> usize {
        if gram.is_empty() || gram.len() > MAX_ORDER {
            return 0;
        }
        self.orders[gram.len() - 1].get(gram).copied().unwrap_or(0)
    }

    pub fn total(&self, n: usize) -> usize {
        self.orders[n - 1].values().sum()
    }
}
