//! Skip-gram with negative sampling over walk corpora.
//!
//! For every (center, context) pair inside the window the loss is
//! `-log σ(u_ctx · v_cen) - Σ_neg log σ(-u_neg · v_cen)`, where `v` rows
//! live in the input matrix and `u` rows in the context matrix.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::alias::AliasTable;
use super::embedding::EmbeddingMatrix;
use super::walks::WalkCorpus;
use crate::dt::Vocabulary;
use crate::error::{Error, Result};
use crate::util::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgnsConfig {
    pub dim: usize,
    /// Context radius on each side of the center token.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    /// Negatives are drawn from unigram counts raised to this power.
    pub noise_exponent: f64,
    pub seed: u64,
    /// 1 trains deterministically; more workers share the matrices without
    /// synchronization and results vary from run to run.
    pub threads: usize,
    /// Skip pairs whose context token is the center token itself. Off by
    /// default: a word still turns up among its own negatives, and without
    /// the positive self pairs nothing balances that push.
    pub skip_self_pairs: bool,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 128,
            window: 10,
            negatives: 5,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 0.0001,
            noise_exponent: 0.75,
            seed: 1,
            threads: 1,
            skip_self_pairs: false,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.negatives == 0 || self.epochs == 0 {
            return Err(Error::contract("dim, window, negatives and epochs must all be at least 1"));
        }
        if !(self.lr_start > self.lr_end && self.lr_end > 0.0 && self.lr_start.is_finite()) {
            return Err(Error::contract(format!(
                "learning rates must satisfy lr_start > lr_end > 0 (got {} / {})",
                self.lr_start, self.lr_end
            )));
        }
        if !self.noise_exponent.is_finite() {
            return Err(Error::contract("noise exponent must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainStats {
    pub pairs_per_epoch: u64,
    pub epoch_mean_loss: Vec<f64>,
}

fn softplus<F: Float>(x: F) -> F {
    x.max(F::zero()) + (-x.abs()).exp().ln_1p()
}

fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Loss of one logistic term and its derivative with respect to the score.
/// A positive term contributes `-log σ(s)`, a negative one `-log σ(-s)`.
#[inline]
fn logistic_term<F: Float>(score: F, positive: bool) -> (F, F) {
    let s = sigmoid(score);
    if positive {
        (softplus(-score), s - F::one())
    } else {
        (softplus(score), s)
    }
}

#[inline]
fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Applies one target's term: accumulates the center gradient into
/// `center_grad` and moves the target row `u` by `-lr · ∂L/∂u`.
#[inline]
fn step_target<F: Float>(center: &[F], u: &mut [F], positive: bool, lr: F, center_grad: &mut [F]) -> F {
    let (loss, coeff) = logistic_term(dot(center, u), positive);
    let scale = lr * coeff;
    for ((g, ui), &c) in center_grad.iter_mut().zip(u.iter_mut()).zip(center) {
        *g = *g + coeff * *ui;
        *ui = *ui - scale * c;
    }
    loss
}

/// Loss of a single (center, positive, negatives) group with its analytic
/// gradients: `(loss, ∂/∂center, ∂/∂positive, ∂/∂negatives)`.
pub fn pair_loss_and_grad<F: Float>(
    center: &[F],
    positive: &[F],
    negatives: &[&[F]],
) -> (F, Vec<F>, Vec<F>, Vec<Vec<F>>) {
    let mut center_grad = vec![F::zero(); center.len()];
    let mut loss = F::zero();
    // With a unit learning rate the target moves by exactly its negative gradient.
    let mut target_grad = |target: &[F], positive: bool| {
        let mut moved = target.to_vec();
        loss = loss + step_target(center, &mut moved, positive, F::one(), &mut center_grad);
        target.iter().zip(&moved).map(|(&a, &b)| a - b).collect::<Vec<F>>()
    };
    let pos_grad = target_grad(positive, true);
    let neg_grads = negatives.iter().map(|n| target_grad(n, false)).collect();
    (loss, center_grad, pos_grad, neg_grads)
}

struct Prepared {
    /// Walks with node ids replaced by matrix rows.
    walks: Vec<Vec<u32>>,
    words: Vec<String>,
    noise: AliasTable,
    pairs_per_epoch: u64,
}

fn prepare(corpus: &WalkCorpus, words: &Vocabulary, cfg: &SgnsConfig) -> Result<Prepared> {
    let mut row_of = vec![u32::MAX; words.len()];
    let mut freq: Vec<u64> = Vec::new();
    let mut ids: Vec<u32> = corpus.walks.iter().flatten().copied().collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.last().is_some_and(|&id| id as usize >= words.len()) {
        return Err(Error::contract("walk corpus references a node outside the vocabulary"));
    }
    for (row, &id) in ids.iter().enumerate() {
        row_of[id as usize] = row as u32;
    }
    freq.resize(ids.len(), 0);
    let walks: Vec<Vec<u32>> = corpus
        .walks
        .iter()
        .map(|w| {
            w.iter()
                .map(|&id| {
                    let r = row_of[id as usize];
                    freq[r as usize] += 1;
                    r
                })
                .collect()
        })
        .collect();
    let noise_weights: Vec<f64> = freq.iter().map(|&c| (c as f64).powf(cfg.noise_exponent)).collect();
    let noise = AliasTable::new(&noise_weights).ok_or_else(|| Error::contract("walk corpus is empty"))?;
    let pairs_per_epoch = walks.iter().map(|w| count_pairs(w, cfg)).sum();
    let words = ids.iter().map(|&id| words.token(id).to_owned()).collect();
    Ok(Prepared {
        walks,
        words,
        noise,
        pairs_per_epoch,
    })
}

fn count_pairs(walk: &[u32], cfg: &SgnsConfig) -> u64 {
    let mut n = 0;
    for (i, &center) in walk.iter().enumerate() {
        let lo = i.saturating_sub(cfg.window);
        let hi = (i + cfg.window).min(walk.len() - 1);
        for (j, &ctx) in walk.iter().enumerate().take(hi + 1).skip(lo) {
            if j != i && !(cfg.skip_self_pairs && ctx == center) {
                n += 1;
            }
        }
    }
    n
}

fn init_input(rows: usize, cfg: &SgnsConfig) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 0));
    let half = 0.5 / cfg.dim as f32;
    (0..rows * cfg.dim).map(|_| rng.gen_range(-half..=half)).collect()
}

/// Learning rate after `processed` of `total` pair updates.
fn learning_rate(cfg: &SgnsConfig, processed: u64, total: u64) -> f32 {
    let frac = processed as f64 / total.max(1) as f64;
    (cfg.lr_start - (cfg.lr_start - cfg.lr_end) * frac) as f32
}

fn diverged(loss: f32, lr: f32) -> Error {
    Error::Numerical(format!(
        "non-finite loss ({loss}) at learning rate {lr}; lower --lr-start"
    ))
}

/// Trains input and context vectors for every node that occurs in the walks.
pub fn train_sgns(corpus: &WalkCorpus, words: &Vocabulary, cfg: &SgnsConfig) -> Result<(EmbeddingMatrix, TrainStats)> {
    cfg.validate()?;
    if corpus.walks.iter().all(|w| w.is_empty()) {
        return Err(Error::contract("walk corpus is empty"));
    }
    let prep = prepare(corpus, words, cfg)?;
    let rows = prep.words.len();
    let mut input = init_input(rows, cfg);
    let mut context = vec![0f32; rows * cfg.dim];
    let stats = if cfg.threads <= 1 {
        train_serial(&prep, cfg, &mut input, &mut context)?
    } else {
        train_shared(&prep, cfg, &mut input, &mut context)?
    };
    let matrix = EmbeddingMatrix::new(prep.words, cfg.dim, input, context)?;
    Ok((matrix, stats))
}

fn train_serial(prep: &Prepared, cfg: &SgnsConfig, input: &mut [f32], context: &mut [f32]) -> Result<TrainStats> {
    let dim = cfg.dim;
    let total = prep.pairs_per_epoch * cfg.epochs as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 1));
    let mut grad = vec![0f32; dim];
    let mut processed = 0u64;
    let mut stats = TrainStats {
        pairs_per_epoch: prep.pairs_per_epoch,
        epoch_mean_loss: Vec::with_capacity(cfg.epochs),
    };
    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0f64;
        for walk in &prep.walks {
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window).min(walk.len() - 1);
                for (j, &ctx) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i || (cfg.skip_self_pairs && ctx == center) {
                        continue;
                    }
                    let lr = learning_rate(cfg, processed, total);
                    processed += 1;
                    let c = center as usize * dim;
                    let v = &mut input[c..c + dim];
                    grad.fill(0.0);
                    let t = ctx as usize * dim;
                    let mut loss = step_target(v, &mut context[t..t + dim], true, lr, &mut grad);
                    for _ in 0..cfg.negatives {
                        let neg = prep.noise.sample(&mut rng);
                        if neg == ctx as usize {
                            continue;
                        }
                        let n = neg * dim;
                        loss += step_target(v, &mut context[n..n + dim], false, lr, &mut grad);
                    }
                    if !loss.is_finite() {
                        return Err(diverged(loss, lr));
                    }
                    for (x, g) in v.iter_mut().zip(&grad) {
                        *x -= lr * g;
                    }
                    epoch_loss += loss as f64;
                }
            }
        }
        stats
            .epoch_mean_loss
            .push(epoch_loss / prep.pairs_per_epoch.max(1) as f64);
    }
    Ok(stats)
}

/// Matrix of f32 values stored as bit patterns in relaxed atomics, so
/// workers may read and write rows concurrently without locks.
struct SharedMatrix {
    cells: Vec<AtomicU32>,
    dim: usize,
}

impl SharedMatrix {
    fn new(values: &[f32], dim: usize) -> Self {
        SharedMatrix {
            cells: values.iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
            dim,
        }
    }

    fn load(&self, row: usize, buf: &mut [f32]) {
        let cells = &self.cells[row * self.dim..(row + 1) * self.dim];
        for (b, c) in buf.iter_mut().zip(cells) {
            *b = f32::from_bits(c.load(Ordering::Relaxed));
        }
    }

    fn store(&self, row: usize, buf: &[f32]) {
        let cells = &self.cells[row * self.dim..(row + 1) * self.dim];
        for (b, c) in buf.iter().zip(cells) {
            c.store(b.to_bits(), Ordering::Relaxed);
        }
    }

    fn write_back(&self, out: &mut [f32]) {
        for (o, c) in out.iter_mut().zip(&self.cells) {
            *o = f32::from_bits(c.load(Ordering::Relaxed));
        }
    }
}

fn train_shared(prep: &Prepared, cfg: &SgnsConfig, input: &mut [f32], context: &mut [f32]) -> Result<TrainStats> {
    let dim = cfg.dim;
    let total = prep.pairs_per_epoch * cfg.epochs as u64;
    let shared_in = SharedMatrix::new(input, dim);
    let shared_ctx = SharedMatrix::new(context, dim);
    let processed = AtomicU64::new(0);
    let workers = cfg.threads.min(prep.walks.len()).max(1);
    let chunk = prep.walks.len().div_ceil(workers);
    let mut epoch_mean_loss = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let losses: Vec<Result<f64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = prep
                .walks
                .chunks(chunk)
                .enumerate()
                .map(|(k, walks)| {
                    let (shared_in, shared_ctx, processed) = (&shared_in, &shared_ctx, &processed);
                    scope.spawn(move || -> Result<f64> {
                        let seed = mix_seed(mix_seed(cfg.seed, 2 + epoch as u64), k as u64);
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let mut v = vec![0f32; dim];
                        let mut u = vec![0f32; dim];
                        let mut grad = vec![0f32; dim];
                        let mut sum = 0f64;
                        for walk in walks {
                            for (i, &center) in walk.iter().enumerate() {
                                let lo = i.saturating_sub(cfg.window);
                                let hi = (i + cfg.window).min(walk.len() - 1);
                                for (j, &ctx) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                                    if j == i || (cfg.skip_self_pairs && ctx == center) {
                                        continue;
                                    }
                                    let lr = learning_rate(cfg, processed.fetch_add(1, Ordering::Relaxed), total);
                                    shared_in.load(center as usize, &mut v);
                                    grad.fill(0.0);
                                    shared_ctx.load(ctx as usize, &mut u);
                                    let mut loss = step_target(&v, &mut u, true, lr, &mut grad);
                                    shared_ctx.store(ctx as usize, &u);
                                    for _ in 0..cfg.negatives {
                                        let neg = prep.noise.sample(&mut rng);
                                        if neg == ctx as usize {
                                            continue;
                                        }
                                        shared_ctx.load(neg, &mut u);
                                        loss += step_target(&v, &mut u, false, lr, &mut grad);
                                        shared_ctx.store(neg, &u);
                                    }
                                    if !loss.is_finite() {
                                        return Err(diverged(loss, lr));
                                    }
                                    for (x, g) in v.iter_mut().zip(&grad) {
                                        *x -= lr * g;
                                    }
                                    shared_in.store(center as usize, &v);
                                    sum += loss as f64;
                                }
                            }
                        }
                        Ok(sum)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
        });
        let mut epoch_loss = 0.0;
        for l in losses {
            epoch_loss += l?;
        }
        epoch_mean_loss.push(epoch_loss / prep.pairs_per_epoch.max(1) as f64);
    }
    shared_in.write_back(input);
    shared_ctx.write_back(context);
    Ok(TrainStats {
        pairs_per_epoch: prep.pairs_per_epoch,
        epoch_mean_loss,
    })
}
