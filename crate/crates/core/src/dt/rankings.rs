//! Word → context-feature association rankings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counts::{CountTable, FeatureId, Vocabulary, WordId};
use crate::error::{Error, Result};

/// Lexicographer's Mutual Information: `c_wf · log2(c_wf · N / (c_w · c_f))`.
pub fn association_score(c_wf: u64, c_w: u64, c_f: u64, total: u64) -> Result<f64> {
    if c_wf == 0 || c_w == 0 || c_f == 0 || total == 0 {
        return Err(Error::contract(format!(
            "association score needs positive counts (c_wf={c_wf}, c_w={c_w}, c_f={c_f}, N={total})"
        )));
    }
    if c_wf > c_w.min(c_f) {
        return Err(Error::contract(format!(
            "joint count {c_wf} exceeds a marginal (c_w={c_w}, c_f={c_f})"
        )));
    }
    let c_wf = c_wf as f64;
    let ratio = (c_wf * total as f64) / (c_w as f64 * c_f as f64);
    Ok(c_wf * ratio.log2())
}

/// Per-word top-k context features by association score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextFeatureTable {
    words: Vocabulary,
    feature_count: usize,
    /// Score-descending, ties by ascending feature id.
    rankings: Vec<Vec<(FeatureId, f64)>>,
    /// The same features sorted by id, for set operations.
    sets: Vec<Vec<FeatureId>>,
}

impl ContextFeatureTable {
    /// Assembles a table from explicit rankings; lists are re-sorted into
    /// canonical order and must not repeat a feature.
    pub fn from_rankings(
        words: Vocabulary,
        feature_count: usize,
        mut rankings: Vec<Vec<(FeatureId, f64)>>,
    ) -> Result<Self> {
        if rankings.len() != words.len() {
            return Err(Error::contract("one ranking list per word is required"));
        }
        for list in &mut rankings {
            sort_ranking(list);
        }
        let sets: Vec<Vec<FeatureId>> = rankings
            .iter()
            .map(|list| {
                let mut s: Vec<FeatureId> = list.iter().map(|p| p.0).collect();
                s.sort_unstable();
                s
            })
            .collect();
        for (w, set) in sets.iter().enumerate() {
            if set.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::contract(format!(
                    "duplicate feature in ranking of '{}'",
                    words.token(w as u32)
                )));
            }
            if set.last().is_some_and(|&f| f as usize >= feature_count) {
                return Err(Error::contract("feature id out of range"));
            }
        }
        Ok(ContextFeatureTable {
            words,
            feature_count,
            rankings,
            sets,
        })
    }

    pub fn words(&self) -> &Vocabulary {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.rankings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn ranking(&self, w: WordId) -> &[(FeatureId, f64)] {
        &self.rankings[w as usize]
    }

    /// Feature ids of a word's ranking in ascending id order.
    pub fn feature_set(&self, w: WordId) -> &[FeatureId] {
        &self.sets[w as usize]
    }

    pub fn lookup(&self, word: &str) -> Result<WordId> {
        self.words
            .id(word)
            .ok_or_else(|| Error::UnknownWord(word.to_owned()))
    }
}

pub(crate) fn sort_ranking(list: &mut [(FeatureId, f64)]) {
    list.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Keeps the `k_features` highest-scoring features of every word.
pub fn build_feature_rankings(table: &CountTable, k_features: usize) -> Result<ContextFeatureTable> {
    if k_features == 0 {
        return Err(Error::contract("k_features must be at least 1"));
    }
    let total = table.total();
    let rankings: Result<Vec<Vec<(FeatureId, f64)>>> = (0..table.words().len() as u32)
        .into_par_iter()
        .map(|w| {
            let c_w = table.word_count(w);
            let mut scored = table
                .row(w)
                .iter()
                .map(|&(_, f, c_wf)| Ok((f, association_score(c_wf, c_w, table.feature_count(f), total)?)))
                .collect::<Result<Vec<_>>>()?;
            sort_ranking(&mut scored);
            scored.truncate(k_features);
            Ok(scored)
        })
        .collect();
    ContextFeatureTable::from_rankings(table.words().clone(), table.features().len(), rankings?)
}

/// Number of top-ranked features two words share.
pub fn overlap_similarity(u: WordId, v: WordId, rankings: &ContextFeatureTable) -> Result<u32> {
    for w in [u, v] {
        if w as usize >= rankings.len() {
            return Err(Error::UnknownWord(format!("#{w}")));
        }
    }
    Ok(sorted_intersection_len(rankings.feature_set(u), rankings.feature_set(v)))
}

/// [`overlap_similarity`] keyed by surface form.
pub fn overlap_similarity_by_word(u: &str, v: &str, rankings: &ContextFeatureTable) -> Result<u32> {
    overlap_similarity(rankings.lookup(u)?, rankings.lookup(v)?, rankings)
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> u32 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
