//! Random forest of CART trees grown on bootstrap samples with Gini
//! impurity splits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::util::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure or too small.
    pub max_depth: Option<usize>,
    /// Features tried per split; `None` means ⌊√d⌋.
    pub mtry: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            mtry: None,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        label: u8,
        counts: [u32; 2],
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    /// Training rows never drawn into this tree's bootstrap sample.
    pub oob: Vec<u32>,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> u8 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { label, .. } => return label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[feature as usize] <= threshold { left } else { right } as usize;
                }
            }
        }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left as usize).max(go(nodes, right as usize)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub params: ForestParams,
}

impl RandomForest {
    /// Majority vote over trees; a tied vote predicts 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        let ones = self.trees.iter().filter(|t| t.predict(x) == 1).count();
        u8::from(2 * ones > self.trees.len())
    }
}

pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (counts[0] as f64 / n, counts[1] as f64 / n);
    1.0 - p0 * p0 - p1 * p1
}

fn majority(counts: [usize; 2]) -> u8 {
    u8::from(counts[1] > counts[0])
}

/// Row indices of a bootstrap sample (`n` draws with replacement).
pub(crate) fn bootstrap_sample(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, tree as u64))
}

pub fn train_random_forest(data: &Dataset, params: ForestParams) -> Result<RandomForest> {
    if data.len() < 2 {
        return Err(Error::contract("random forest needs at least two rows"));
    }
    if params.n_trees == 0 {
        return Err(Error::contract("random forest needs at least one tree"));
    }
    let d = data.dim().max(1);
    let mtry = params
        .mtry
        .unwrap_or_else(|| (d as f64).sqrt().floor() as usize)
        .clamp(1, d);
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(params.seed, t);
            let sample = bootstrap_sample(data.len(), &mut rng);
            let mut drawn = vec![false; data.len()];
            sample.iter().for_each(|&i| drawn[i] = true);
            let oob = (0..data.len() as u32).filter(|&i| !drawn[i as usize]).collect();
            let mut tree = fit_tree(data, &sample, params.max_depth, mtry, &mut rng);
            tree.oob = oob;
            tree
        })
        .collect();
    Ok(RandomForest { trees, params })
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

/// Best Gini split of `rows` on one feature, over midpoints of consecutive
/// distinct values. Returns `None` when the feature is constant on `rows`.
fn best_split_on(data: &Dataset, rows: &[usize], feature: usize, parent: f64) -> Option<SplitChoice> {
    let mut values: Vec<(f64, u8)> = rows.iter().map(|&i| (data.row(i)[feature], data.label(i))).collect();
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = values.len();
    let mut total = [0usize; 2];
    values.iter().for_each(|v| total[v.1 as usize] += 1);
    let mut left = [0usize; 2];
    let mut best: Option<SplitChoice> = None;
    for k in 0..n - 1 {
        left[values[k].1 as usize] += 1;
        let (lo, hi) = (values[k].0, values[k + 1].0);
        if lo == hi {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let nl = (k + 1) as f64;
        let child = (nl * gini(left) + (n as f64 - nl) * gini(right)) / n as f64;
        let decrease = parent - child;
        if best.as_ref().is_none_or(|b| decrease > b.decrease) {
            let mid = lo + (hi - lo) / 2.0;
            let threshold = if mid < hi { mid } else { lo };
            best = Some(SplitChoice {
                feature,
                threshold,
                decrease,
            });
        }
    }
    best
}

/// Grows one CART tree on `sample` (row indices, repeats allowed).
///
/// At each node `mtry` features are tried in random order; if none of them
/// varies on the node's rows, further features are drawn until one does or
/// all are exhausted. A node becomes a leaf when pure, at the depth cap, or
/// with fewer than two rows.
pub fn fit_tree(
    data: &Dataset,
    sample: &[usize],
    max_depth: Option<usize>,
    mtry: usize,
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    let d = data.dim();
    let mut nodes: Vec<Node> = Vec::new();
    let mut features: Vec<usize> = (0..d).collect();
    // (node slot, rows, depth)
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, sample.to_vec(), 0)];
    nodes.push(Node::Leaf {
        label: 0,
        counts: [0, 0],
    });
    while let Some((slot, rows, depth)) = stack.pop() {
        let mut counts = [0usize; 2];
        rows.iter().for_each(|&i| counts[data.label(i) as usize] += 1);
        let leaf = Node::Leaf {
            label: majority(counts),
            counts: [counts[0] as u32, counts[1] as u32],
        };
        let pure = counts[0] == 0 || counts[1] == 0;
        if pure || rows.len() < 2 || max_depth.is_some_and(|m| depth >= m) {
            nodes[slot] = leaf;
            continue;
        }
        let parent = gini(counts);
        let mut best: Option<SplitChoice> = None;
        for k in 0..d {
            if k >= mtry && best.is_some() {
                break;
            }
            let j = rng.gen_range(k..d);
            features.swap(k, j);
            let f = features[k];
            if let Some(c) = best_split_on(data, &rows, f, parent) {
                if best.as_ref().is_none_or(|b| c.decrease > b.decrease) {
                    best = Some(c);
                }
            }
        }
        let Some(split) = best else {
            nodes[slot] = leaf;
            continue;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| data.row(i)[split.feature] <= split.threshold);
        let left = nodes.len();
        nodes.push(leaf);
        nodes.push(leaf);
        nodes[slot] = Node::Split {
            feature: split.feature as u32,
            threshold: split.threshold,
            left: left as u32,
            right: left as u32 + 1,
        };
        stack.push((left + 1, right_rows, depth + 1));
        stack.push((left, left_rows, depth + 1));
    }
    DecisionTree { nodes, oob: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accuracy(f: &RandomForest, d: &Dataset) -> f64 {
        (0..d.len()).filter(|&i| f.predict(d.row(i)) == d.label(i)).count() as f64 / d.len() as f64
    }

    #[test]
    fn pure_data_grows_single_leaves() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], vec![1, 1, 1]).unwrap();
        let f = train_random_forest(&d, ForestParams { n_trees: 5, ..Default::default() }).unwrap();
        for t in &f.trees {
            assert_eq!(t.nodes.len(), 1);
            assert!(matches!(t.root(), Node::Leaf { label: 1, .. }));
        }
    }

    #[test]
    fn one_dimensional_split_matches_exhaustive_scan() {
        let xs = [0.1, 0.4, 0.35, 0.8, 0.9, 0.2, 0.65, 0.7, 0.5, 0.05];
        let ys = [0u8, 0, 1, 1, 1, 0, 1, 0, 1, 0];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let d = Dataset::from_rows(&rows, ys.to_vec()).unwrap();
        let all: Vec<usize> = (0..xs.len()).collect();
        let tree = fit_tree(&d, &all, Some(1), 1, &mut ChaCha8Rng::seed_from_u64(0));

        // oracle: weighted child impurity at every midpoint, computed from scratch
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut best = (f64::INFINITY, 0.0);
        for w in sorted.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let side = |left: bool| {
                let ys: Vec<u8> = xs.iter().zip(ys).filter(|(x, _)| (**x <= t) == left).map(|p| p.1).collect();
                let p = ys.iter().filter(|&&y| y == 1).count() as f64 / ys.len() as f64;
                (ys.len() as f64, 2.0 * p * (1.0 - p))
            };
            let ((nl, gl), (nr, gr)) = (side(true), side(false));
            let impurity = (nl * gl + nr * gr) / (nl + nr);
            if impurity < best.0 - 1e-15 {
                best = (impurity, t);
            }
        }
        match tree.root() {
            Node::Split { threshold, feature, .. } => {
                assert_eq!(*feature, 0);
                assert!((threshold - best.1).abs() < 1e-12, "{threshold} vs {}", best.1);
            }
            leaf => panic!("expected a split, got {leaf:?}"),
        }
        assert_eq!(tree.depth(), 1);
    }

    #[test]
    fn bootstrap_bookkeeping_is_consistent() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let labels = (0..30).map(|i| (i % 3 == 0) as u8).collect();
        let d = Dataset::from_rows(&rows, labels).unwrap();
        let params = ForestParams { n_trees: 8, seed: 77, ..Default::default() };
        let f = train_random_forest(&d, params).unwrap();
        for (t, tree) in f.trees.iter().enumerate() {
            let sample = bootstrap_sample(d.len(), &mut tree_rng(params.seed, t));
            let mut support: Vec<u32> = sample.iter().map(|&i| i as u32).collect();
            support.sort_unstable();
            support.dedup();
            assert!(tree.oob.iter().all(|i| support.binary_search(i).is_err()));
            assert_eq!(support.len() + tree.oob.len(), d.len());
        }
    }

    #[test]
    fn full_single_tree_memorizes_unique_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| vec![rng.gen(), rng.gen(), rng.gen()]).collect();
        let labels: Vec<u8> = (0..60).map(|_| rng.gen_range(0..2)).collect();
        let d = Dataset::from_rows(&rows, labels).unwrap();
        let all: Vec<usize> = (0..d.len()).collect();
        let tree = fit_tree(&d, &all, None, 3, &mut rng);
        assert!((0..d.len()).all(|i| tree.predict(d.row(i)) == d.label(i)));
    }

    #[test]
    fn forest_learns_xor() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for k in 0..100 {
            let (cx, cy) = [(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)][k % 4];
            rows.push(vec![cx + rng.gen_range(-0.2..0.2), cy + rng.gen_range(-0.2..0.2)]);
            labels.push(u8::from(k % 4 >= 2));
        }
        let d = Dataset::from_rows(&rows, labels).unwrap();
        let f = train_random_forest(&d, ForestParams { n_trees: 50, ..Default::default() }).unwrap();
        assert!(accuracy(&f, &d) > 0.95);
    }

    #[test]
    fn tied_vote_predicts_zero() {
        let leaf = |label| DecisionTree {
            nodes: vec![Node::Leaf { label, counts: [1, 1] }],
            oob: vec![],
        };
        let f = RandomForest {
            trees: vec![leaf(0), leaf(1)],
            params: ForestParams::default(),
        };
        assert_eq!(f.predict(&[0.0]), 0);
    }

    #[test]
    fn training_is_deterministic() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i * 7 % 13) as f64, (i % 5) as f64]).collect();
        let labels = (0..40).map(|i| (i % 2) as u8).collect();
        let d = Dataset::from_rows(&rows, labels).unwrap();
        let p = ForestParams { n_trees: 10, ..Default::default() };
        assert_eq!(train_random_forest(&d, p).unwrap(), train_random_forest(&d, p).unwrap());
    }
}
