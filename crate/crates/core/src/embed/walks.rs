//! Second-order biased random walks.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::alias::AliasTable;
use crate::dt::{DtGraph, WordId};
use crate::error::{Error, Result};
use crate::util::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Nodes per walk, including the start node.
    pub walk_length: usize,
    pub walks_per_node: usize,
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walk_length: 80,
            walks_per_node: 10,
            p: 1.0,
            q: 1.0,
            seed: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walk_length < 2 {
            return Err(Error::contract("walk_length must be at least 2"));
        }
        if self.walks_per_node == 0 {
            return Err(Error::contract("walks_per_node must be at least 1"));
        }
        check_bias(self.p, self.q)
    }
}

fn check_bias(p: f64, q: f64) -> Result<()> {
    if !(p.is_finite() && p > 0.0 && q.is_finite() && q > 0.0) {
        return Err(Error::contract(format!("p and q must be finite and positive (p={p}, q={q})")));
    }
    Ok(())
}

/// Unnormalized weight of stepping `prev → cur → next`.
pub fn biased_weight(graph: &DtGraph, prev: WordId, next: WordId, edge_weight: u32, p: f64, q: f64) -> f64 {
    let w = edge_weight as f64;
    if next == prev {
        w / p
    } else if graph.is_adjacent(prev, next) {
        w
    } else {
        w / q
    }
}

/// Alias tables for every first step (per node) and every second-order
/// step (per arc `prev → cur`, over `cur`'s neighbors).
#[derive(Debug, Clone)]
pub struct TransitionTable {
    node_count: usize,
    arc_count: usize,
    p: f64,
    q: f64,
    first: Vec<Option<AliasTable>>,
    /// Indexed by CSR arc id of `prev → cur`.
    second: Vec<AliasTable>,
}

impl TransitionTable {
    pub fn first_step(&self, node: WordId) -> Option<&AliasTable> {
        self.first[node as usize].as_ref()
    }

    /// Distribution over the neighbors of `arc`'s target, given that the
    /// walk arrived through `arc`.
    pub fn second_step(&self, arc: usize) -> &AliasTable {
        &self.second[arc]
    }

    pub fn bias(&self) -> (f64, f64) {
        (self.p, self.q)
    }

    pub fn all_tables(&self) -> impl Iterator<Item = &AliasTable> {
        self.first.iter().flatten().chain(self.second.iter())
    }

    fn check_graph(&self, graph: &DtGraph) -> Result<()> {
        if graph.node_count() != self.node_count || graph.arc_count() != self.arc_count {
            return Err(Error::contract(format!(
                "transition table built for {} nodes / {} arcs, graph has {} / {}",
                self.node_count,
                self.arc_count,
                graph.node_count(),
                graph.arc_count()
            )));
        }
        Ok(())
    }
}

pub fn precompute_transitions(graph: &DtGraph, p: f64, q: f64) -> Result<TransitionTable> {
    check_bias(p, q)?;
    if graph.edge_count() == 0 {
        return Err(Error::contract("graph has no edges"));
    }
    let first = (0..graph.node_count() as WordId)
        .into_par_iter()
        .map(|u| {
            let w: Vec<f64> = graph.weights(u).iter().map(|&w| w as f64).collect();
            AliasTable::new(&w)
        })
        .collect();
    let second = (0..graph.node_count() as WordId)
        .into_par_iter()
        .flat_map_iter(|prev| {
            graph.neighbors(prev).iter().map(move |&cur| {
                let weights: Vec<f64> = graph
                    .neighbors(cur)
                    .iter()
                    .zip(graph.weights(cur))
                    .map(|(&next, &w)| biased_weight(graph, prev, next, w, p, q))
                    .collect();
                AliasTable::new(&weights).expect("a node reached by an arc has a neighbor")
            })
        })
        .collect();
    Ok(TransitionTable {
        node_count: graph.node_count(),
        arc_count: graph.arc_count(),
        p,
        q,
        first,
        second,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<WordId>>,
    /// Nodes without edges; they start no walks.
    pub isolated: Vec<WordId>,
}

impl WalkCorpus {
    pub fn token_count(&self) -> usize {
        self.walks.iter().map(Vec::len).sum()
    }
}

/// Simulates `walks_per_node` rounds; each round visits every non-isolated
/// node once in a seeded shuffled order. Every walk owns a generator derived
/// from (seed, round, start node), so output does not depend on scheduling.
pub fn generate_walks(graph: &DtGraph, table: &TransitionTable, cfg: &WalkConfig) -> Result<WalkCorpus> {
    cfg.validate()?;
    table.check_graph(graph)?;
    let (starts, isolated): (Vec<WordId>, Vec<WordId>) =
        (0..graph.node_count() as WordId).partition(|&u| !graph.is_isolated(u));
    if !isolated.is_empty() {
        log::info!("{} isolated nodes produce no walks", isolated.len());
    }

    let mut jobs = Vec::with_capacity(starts.len() * cfg.walks_per_node);
    for round in 0..cfg.walks_per_node {
        let mut order = starts.clone();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, round as u64)));
        jobs.extend(order.into_iter().map(|u| (round, u)));
    }

    let walks = jobs
        .into_par_iter()
        .map(|(round, start)| {
            let seed = mix_seed(mix_seed(cfg.seed ^ 0x5741_4C4B, round as u64), start as u64);
            walk_from(graph, table, start, cfg.walk_length, &mut ChaCha8Rng::seed_from_u64(seed))
        })
        .collect();
    Ok(WalkCorpus { walks, isolated })
}

fn walk_from(graph: &DtGraph, table: &TransitionTable, start: WordId, len: usize, rng: &mut ChaCha8Rng) -> Vec<WordId> {
    let mut walk = Vec::with_capacity(len);
    walk.push(start);
    let Some(first) = table.first_step(start) else {
        return walk;
    };
    let mut arc = graph.range(start).start + first.sample(rng);
    walk.push(graph.arc_target(arc));
    while walk.len() < len {
        let cur = graph.arc_target(arc);
        let k = table.second_step(arc).sample(rng);
        arc = graph.range(cur).start + k;
        walk.push(graph.arc_target(arc));
    }
    walk
}
