use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense `n × d` feature matrix with binary labels (1 = co-hyponym).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(dim: usize, features: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if features.len() != dim * labels.len() {
            return Err(Error::contract(format!(
                "{} feature values do not form {} rows of width {dim}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(i) = features.iter().position(|x| !x.is_finite()) {
            return Err(Error::contract(format!("non-finite feature in row {}", i / dim.max(1))));
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::contract(format!("label of row {i} is not 0 or 1")));
        }
        Ok(Dataset { dim, features, labels })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::contract("rows have differing widths"));
        }
        if rows.len() != labels.len() {
            return Err(Error::contract("row and label counts differ"));
        }
        Dataset::new(dim, rows.concat(), labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.len()).map(move |i| self.row(i))
    }

    /// `[negatives, positives]`
    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - pos, pos]
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            dim: self.dim,
            features,
            labels,
        }
    }
}
