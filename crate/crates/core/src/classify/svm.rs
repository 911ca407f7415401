//! Linear SVM trained with Pegasos (primal sub-gradient descent on the
//! L2-regularized hinge loss, step size `1 / (λ t)`).
//!
//! The bias is handled as an extra constant input feature, so it is
//! regularized together with the weights.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-4,
            epochs: 100,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub params: SvmParams,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    /// Positive margin predicts the co-hyponym class; zero predicts 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.decision(x) > 0.0)
    }
}

/// `λ/2 · (‖w‖² + b²) + mean hinge loss`, labels mapped to ±1.
pub fn svm_objective(data: &Dataset, weights: &[f64], bias: f64, lambda: f64) -> f64 {
    let reg = 0.5 * lambda * (weights.iter().map(|w| w * w).sum::<f64>() + bias * bias);
    let hinge: f64 = (0..data.len())
        .map(|i| {
            let y = if data.label(i) == 1 { 1.0 } else { -1.0 };
            let s: f64 = weights.iter().zip(data.row(i)).map(|(w, x)| w * x).sum::<f64>() + bias;
            (1.0 - y * s).max(0.0)
        })
        .sum();
    reg + hinge / data.len().max(1) as f64
}

pub fn train_linear_svm(data: &Dataset, params: SvmParams) -> Result<LinearSvm> {
    let [neg, pos] = data.class_counts();
    if data.len() < 2 || neg == 0 || pos == 0 {
        return Err(Error::contract(
            "linear SVM needs at least two rows covering both classes",
        ));
    }
    if !(params.lambda > 0.0) || params.epochs == 0 {
        return Err(Error::contract("SVM needs lambda > 0 and at least one epoch"));
    }
    let d = data.dim();
    let lambda = params.lambda;
    let radius = 1.0 / lambda.sqrt();
    // w[d] is the bias weight on a constant 1 input.
    let mut w = vec![0.0; d + 1];
    let mut avg = vec![0.0; d + 1];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut t = 0u64;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let x = data.row(i);
            let y = if data.label(i) == 1 { 1.0 } else { -1.0 };
            let margin = y * (w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d]);
            let eta = 1.0 / (lambda * t as f64);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                for (v, xi) in w[..d].iter_mut().zip(x) {
                    *v += eta * y * xi;
                }
                w[d] += eta * y;
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|v| *v *= s);
            }
            let k = t as f64;
            for (a, v) in avg.iter_mut().zip(&w) {
                *a += (v - *a) / k;
            }
        }
    }
    // Pegasos guarantees hold for the averaged iterate; keep whichever of
    // the last and averaged iterates has the lower objective.
    let obj = |v: &[f64]| svm_objective(data, &v[..d], v[d], lambda);
    let best = if obj(&avg) < obj(&w) { avg } else { w };
    Ok(LinearSvm {
        weights: best[..d].to_vec(),
        bias: best[d],
        params,
    })
}
