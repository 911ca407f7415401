use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub train: Dataset,
    pub k: usize,
}

impl KnnModel {
    pub fn new(train: Dataset, k: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::contract("kNN needs a non-empty training set"));
        }
        if k == 0 || k > train.len() {
            return Err(Error::contract(format!(
                "k = {k} must lie in 1..={} (training rows)",
                train.len()
            )));
        }
        Ok(KnnModel { train, k })
    }

    pub fn predict(&self, query: &[f64]) -> u8 {
        vote(&self.train, query, self.k)
    }
}

/// Majority label among the `k` nearest training rows (Euclidean).
/// Equal distances favor the lower row index; a tied vote predicts 0.
pub fn knn_predict(train: &Dataset, query: &[f64], k: usize) -> Result<u8> {
    if train.is_empty() {
        return Err(Error::contract("kNN needs a non-empty training set"));
    }
    if k == 0 || k > train.len() {
        return Err(Error::contract(format!("k = {k} must lie in 1..={}", train.len())));
    }
    if query.len() != train.dim() {
        return Err(Error::contract("query dimension differs from training data"));
    }
    Ok(vote(train, query, k))
}

fn vote(train: &Dataset, query: &[f64], k: usize) -> u8 {
    let mut dist: Vec<(f64, usize)> = train
        .rows()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, order);
    }
    let ones = dist[..k].iter().filter(|&&(_, i)| train.label(i) == 1).count();
    u8::from(2 * ones > k)
}
