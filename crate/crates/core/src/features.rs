//! Composition of two word vectors into one classifier input.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{lin_similarity, Dataset};
use crate::dt::ContextFeatureTable;
use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::LabeledPairDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionOp {
    /// first − second
    Diff,
    /// first followed by second
    Cc,
    Add,
    Mul,
    /// second vector only
    Sing,
}

impl CompositionOp {
    pub const ALL: [CompositionOp; 5] = [
        CompositionOp::Diff,
        CompositionOp::Cc,
        CompositionOp::Add,
        CompositionOp::Mul,
        CompositionOp::Sing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompositionOp::Diff => "diff",
            CompositionOp::Cc => "cc",
            CompositionOp::Add => "add",
            CompositionOp::Mul => "mul",
            CompositionOp::Sing => "sing",
        }
    }

    pub fn output_dim(self, dim: usize) -> usize {
        if self == CompositionOp::Cc {
            2 * dim
        } else {
            dim
        }
    }
}

impl fmt::Display for CompositionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompositionOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let alias = match s.as_str() {
            "cat" | "concat" => "cc",
            "mult" => "mul",
            other => other,
        };
        CompositionOp::ALL
            .into_iter()
            .find(|op| op.name() == alias)
            .ok_or_else(|| Error::Format(format!("unknown composition '{s}' (expected diff, cc, add, mul or sing)")))
    }
}

pub fn compose(first: &[f64], second: &[f64], op: CompositionOp) -> Result<Vec<f64>> {
    if first.len() != second.len() {
        return Err(Error::contract(format!(
            "cannot compose vectors of dimension {} and {}",
            first.len(),
            second.len()
        )));
    }
    let zip = |f: fn(f64, f64) -> f64| first.iter().zip(second).map(|(&a, &b)| f(a, b)).collect();
    Ok(match op {
        CompositionOp::Diff => zip(|a, b| a - b),
        CompositionOp::Cc => [first, second].concat(),
        CompositionOp::Add => zip(|a, b| a + b),
        CompositionOp::Mul => zip(|a, b| a * b),
        CompositionOp::Sing => second.to_vec(),
    })
}

/// What a pair is turned into before classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    Compose(CompositionOp),
    /// One column holding the Lin similarity of the two words.
    Lin,
}

impl fmt::Display for FeatureSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSource::Compose(op) => write!(f, "{op}"),
            FeatureSource::Lin => f.write_str("lin"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OovPair {
    /// Record index in the input dataset.
    pub index: usize,
    pub word1: String,
    pub word2: String,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct FeaturizedPairs {
    pub data: Dataset,
    /// Dataset record index of every feature row.
    pub records: Vec<usize>,
    /// Pairs left out because a word has no vector (or no ranking).
    pub oov: Vec<OovPair>,
}

fn to_f64(v: &[f32], l2_normalize: bool) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|&x| x as f64).collect();
    if l2_normalize {
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            out.iter_mut().for_each(|x| *x /= norm);
        }
    }
    out
}

/// One row per pair whose words both have vectors; the others are listed
/// in `oov`.
pub fn featurize_dataset(
    pairs: &LabeledPairDataset,
    emb: &EmbeddingMatrix,
    op: CompositionOp,
    l2_normalize: bool,
) -> Result<FeaturizedPairs> {
    featurize_with(pairs, |w| emb.contains(w), |a, b| {
        let (va, vb) = (emb.lookup(a)?, emb.lookup(b)?);
        compose(&to_f64(va, l2_normalize), &to_f64(vb, l2_normalize), op)
    }, op.output_dim(emb.dim()))
}

/// Single-column Lin similarity features from a feature ranking table.
pub fn featurize_lin(pairs: &LabeledPairDataset, rankings: &ContextFeatureTable) -> Result<FeaturizedPairs> {
    featurize_with(
        pairs,
        |w| rankings.words().id(w).is_some(),
        |a, b| Ok(vec![lin_similarity(a, b, rankings).unwrap_or(0.0)]),
        1,
    )
}

fn featurize_with(
    pairs: &LabeledPairDataset,
    known: impl Fn(&str) -> bool,
    row: impl Fn(&str, &str) -> Result<Vec<f64>>,
    dim: usize,
) -> Result<FeaturizedPairs> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut records = Vec::new();
    let mut oov = Vec::new();
    for (index, rec) in pairs.records().iter().enumerate() {
        let missing: Vec<String> = [&rec.word1, &rec.word2]
            .into_iter()
            .filter(|w| !known(w))
            .cloned()
            .collect();
        if !missing.is_empty() {
            oov.push(OovPair {
                index,
                word1: rec.word1.clone(),
                word2: rec.word2.clone(),
                missing,
            });
            continue;
        }
        features.extend(row(&rec.word1, &rec.word2)?);
        labels.push(rec.label());
        records.push(index);
    }
    if records.is_empty() && !pairs.is_empty() {
        log::warn!("every pair of '{}' is out of vocabulary", pairs.name());
    }
    Ok(FeaturizedPairs {
        data: Dataset::new(dim, features, labels)?,
        records,
        oov,
    })
}
