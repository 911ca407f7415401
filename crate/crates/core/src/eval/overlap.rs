//! Pair overlap between two datasets, ignoring order and relation tags.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::pairs::LabeledPairDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub distinct_a: usize,
    pub distinct_b: usize,
    pub shared: usize,
    pub pct_of_a: f64,
    pub pct_of_b: f64,
}

fn unordered_pairs(d: &LabeledPairDataset) -> BTreeSet<(&str, &str)> {
    d.records()
        .iter()
        .map(|r| {
            let (a, b) = (r.word1.as_str(), r.word2.as_str());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}

/// Percentages are over distinct unordered pairs; an empty side gives 0.
pub fn dataset_overlap(a: &LabeledPairDataset, b: &LabeledPairDataset) -> Overlap {
    let (sa, sb) = (unordered_pairs(a), unordered_pairs(b));
    let shared = sa.intersection(&sb).count();
    let pct = |n: usize| if n == 0 { 0.0 } else { 100.0 * shared as f64 / n as f64 };
    Overlap {
        distinct_a: sa.len(),
        distinct_b: sb.len(),
        shared,
        pct_of_a: pct(sa.len()),
        pct_of_b: pct(sb.len()),
    }
}
