//! Stratified k-fold splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::mix_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    k: usize,
    assignments: Vec<usize>,
}

impl FoldSplit {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold id of every record.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }
}

/// Shuffles each class with its own seeded stream, then deals records to
/// folds round-robin. The dealing cursor carries over from one class to the
/// next so fold sizes stay within one of each other.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<FoldSplit> {
    if k < 2 {
        return Err(Error::contract(format!("need at least 2 folds, got {k}")));
    }
    let mut assignments = vec![usize::MAX; labels.len()];
    let mut cursor = 0usize;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::contract(format!(
                "class {class} has {} records, fewer than {k} folds",
                members.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, class as u64));
        members.shuffle(&mut rng);
        for i in members {
            assignments[i] = cursor % k;
            cursor += 1;
        }
    }
    if let Some(i) = assignments.iter().position(|&a| a == usize::MAX) {
        return Err(Error::contract(format!("label {} at record {i} is not 0 or 1", labels[i])));
    }
    Ok(FoldSplit { k, assignments })
}
