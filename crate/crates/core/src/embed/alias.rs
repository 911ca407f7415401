//! Walker/Vose alias tables for O(1) categorical sampling.

use rand::Rng;

/// A fixed categorical distribution prepared for constant-time draws.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds the table from non-negative weights with a positive sum.
    /// Returns `None` for an empty or all-zero weight vector.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let n = weights.len();
        let sum: f64 = weights.iter().sum();
        if n == 0 || !(sum > 0.0) || !sum.is_finite() {
            return None;
        }
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / sum).collect();
        let mut prob = vec![0.0; n];
        let mut alias = vec![0u32; n];
        let mut small = Vec::with_capacity(n);
        let mut large = Vec::with_capacity(n);
        for (i, &p) in scaled.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
            alias[i] = i as u32;
        }
        Some(AliasTable { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }

    /// The categorical distribution the table encodes, recovered from its
    /// columns.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut p: Vec<f64> = self.prob.iter().map(|&q| q / n).collect();
        for (i, &q) in self.prob.iter().enumerate() {
            p[self.alias[i] as usize] += (1.0 - q) / n;
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_or_zero_weights_rejected() {
        assert!(AliasTable::new(&[]).is_none());
        assert!(AliasTable::new(&[0.0, 0.0]).is_none());
    }

    proptest! {
        #[test]
        fn encodes_normalized_weights(weights in prop::collection::vec(0.0f64..10.0, 1..40)) {
            prop_assume!(weights.iter().sum::<f64>() > 1e-6);
            let t = AliasTable::new(&weights).unwrap();
            let sum: f64 = weights.iter().sum();
            let p = t.probabilities();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (pi, wi) in p.iter().zip(&weights) {
                prop_assert!((pi - wi / sum).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empirical_frequencies_match() {
        let weights = [1.0, 2.0, 3.0, 0.5, 3.5];
        let t = AliasTable::new(&weights).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 100_000;
        let mut hist = [0usize; 5];
        for _ in 0..draws {
            hist[t.sample(&mut rng)] += 1;
        }
        let l1: f64 = hist
            .iter()
            .zip(&weights)
            .map(|(&h, w)| (h as f64 / draws as f64 - w / 10.0).abs())
            .sum();
        assert!(l1 < 0.01, "L1 distance {l1}");
    }
}
