//! Single-score threshold classifiers ("the relation holds if the score is
//! greater than p").

use serde::{Deserialize, Serialize};

use super::similarity::cosine;
use crate::error::{Error, Result};

/// Picks the threshold with the highest training accuracy for the rule
/// `score > p ⇒ 1`. Candidates are the midpoints between consecutive
/// distinct scores plus one value below the minimum (everything positive)
/// and the maximum itself (everything negative); ties go to the smallest p.
pub fn fit_threshold(scores: &[(f64, u8)]) -> Result<f64> {
    if !scores.iter().any(|s| s.1 == 1) || !scores.iter().any(|s| s.1 == 0) {
        return Err(Error::contract("threshold fitting needs both labels"));
    }
    if scores.iter().any(|s| !s.0.is_finite()) {
        return Err(Error::contract("threshold fitting needs finite scores"));
    }
    let mut sorted: Vec<(f64, u8)> = scores.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let positives = sorted.iter().filter(|s| s.1 == 1).count();

    // Below the minimum every row is predicted positive.
    let mut correct = positives;
    let mut best = (correct, sorted[0].0 - 1.0);
    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == value {
            // this row moves to the "≤ p" side
            if sorted[i].1 == 1 {
                correct -= 1;
            } else {
                correct += 1;
            }
            i += 1;
        }
        let p = match sorted.get(i) {
            Some(next) => {
                let mid = value + (next.0 - value) / 2.0;
                if mid < next.0 { mid } else { value }
            }
            None => value,
        };
        if correct > best.0 {
            best = (correct, p);
        }
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreKind {
    /// Cosine between the two halves of a concatenated pair vector.
    Cosine,
    /// A precomputed score stored as the single feature.
    Lin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdModel {
    pub kind: ScoreKind,
    pub threshold: f64,
}

impl ThresholdModel {
    pub fn fit(kind: ScoreKind, rows: impl Iterator<Item = (f64, u8)>) -> Result<Self> {
        let scores: Vec<(f64, u8)> = rows.collect();
        Ok(ThresholdModel {
            kind,
            threshold: fit_threshold(&scores)?,
        })
    }

    /// Score of one feature row. A zero half has cosine 0.
    pub fn score(kind: ScoreKind, x: &[f64]) -> f64 {
        match kind {
            ScoreKind::Cosine => {
                let (a, b) = x.split_at(x.len() / 2);
                cosine(a, b).unwrap_or(0.0)
            }
            ScoreKind::Lin => x.first().copied().unwrap_or(0.0),
        }
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(Self::score(self.kind, x) > self.threshold)
    }
}
