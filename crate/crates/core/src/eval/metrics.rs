//! Binary classification metrics with the co-hyponym class as positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// Positive-class F1, in percent.
    pub f1_percent: f64,
    pub precision: f64,
    pub recall: f64,
    /// Unweighted mean of both classes' F1, in percent.
    pub macro_f1_percent: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Empty precision or recall denominators count as 0.
pub fn metrics(predictions: &[u8], gold: &[u8]) -> Result<Metrics> {
    if predictions.len() != gold.len() || gold.is_empty() {
        return Err(Error::contract(format!(
            "metrics need equal non-empty vectors, got {} predictions and {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p != 0, g != 0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    Ok(from_counts(tp, fp, tn, fn_))
}

pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Metrics {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let pos = f1(precision, recall);
    let neg = f1(ratio(tn, tn + fn_), ratio(tn, tn + fp));
    Metrics {
        accuracy: ratio(tp + tn, tp + fp + tn + fn_),
        f1_percent: 100.0 * pos,
        precision,
        recall,
        macro_f1_percent: 50.0 * (pos + neg),
        tp,
        fp,
        tn,
        fn_,
    }
}
