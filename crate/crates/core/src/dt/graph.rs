//! The distributional-thesaurus graph.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use super::counts::{Vocabulary, WordId};
use super::rankings::ContextFeatureTable;
use crate::error::{Error, Result};
use crate::util;

const GRAPH_MAGIC: &[u8; 4] = b"DTG1";

/// Undirected weighted word graph in CSR layout. Neighbor lists are sorted
/// by ascending neighbor id; every edge is stored in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtGraph {
    words: Vocabulary,
    offsets: Vec<u64>,
    neighbors: Vec<WordId>,
    weights: Vec<u32>,
}

impl DtGraph {
    /// Builds a graph from an undirected edge list. Each edge may be given
    /// once in either orientation; self-loops and zero weights are rejected.
    pub fn from_edges(words: Vocabulary, edges: &[(WordId, WordId, u32)]) -> Result<Self> {
        let n = words.len();
        let mut lists: Vec<Vec<(WordId, u32)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u == v {
                return Err(Error::contract(format!("self-loop on node {u}")));
            }
            if w == 0 {
                return Err(Error::contract("edge weights must be positive"));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::contract("edge endpoint out of range"));
            }
            lists[u as usize].push((v, w));
            lists[v as usize].push((u, w));
        }
        Self::from_adjacency(words, lists)
    }

    fn from_adjacency(words: Vocabulary, mut lists: Vec<Vec<(WordId, u32)>>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0u64);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            if list.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::contract("conflicting weights for one edge"));
            }
            for &(v, w) in list.iter() {
                neighbors.push(v);
                weights.push(w);
            }
            offsets.push(neighbors.len() as u64);
        }
        Ok(DtGraph {
            words,
            offsets,
            neighbors,
            weights,
        })
    }

    pub fn words(&self) -> &Vocabulary {
        &self.words
    }

    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    /// Number of stored directed arcs (twice the undirected edge count).
    pub fn arc_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, u: WordId) -> usize {
        self.range(u).len()
    }

    /// Index range of `u`'s arcs in the CSR arrays.
    pub fn range(&self, u: WordId) -> std::ops::Range<usize> {
        self.offsets[u as usize] as usize..self.offsets[u as usize + 1] as usize
    }

    pub fn neighbors(&self, u: WordId) -> &[WordId] {
        &self.neighbors[self.range(u)]
    }

    pub fn weights(&self, u: WordId) -> &[u32] {
        &self.weights[self.range(u)]
    }

    pub fn arc_target(&self, arc: usize) -> WordId {
        self.neighbors[arc]
    }

    pub fn weight(&self, u: WordId, v: WordId) -> Option<u32> {
        self.neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|i| self.weights(u)[i])
    }

    pub fn is_adjacent(&self, u: WordId, v: WordId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn is_isolated(&self, u: WordId) -> bool {
        self.degree(u) == 0
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.words.id(word)
    }

    /// Up to `n` neighbors ordered by descending weight, ties by ascending id.
    pub fn top_neighbors(&self, u: WordId, n: usize) -> Vec<(WordId, u32)> {
        let mut list: Vec<(WordId, u32)> = self
            .neighbors(u)
            .iter()
            .copied()
            .zip(self.weights(u).iter().copied())
            .collect();
        list.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        list.truncate(n);
        list
    }

    /// Every undirected edge once, as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (WordId, WordId, u32)> + '_ {
        (0..self.node_count() as WordId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .zip(self.weights(u))
                .filter(move |(&v, _)| u < v)
                .map(move |(&v, &w)| (u, v, w))
        })
    }

    /// Serializes to the `DTG1` binary layout (all integers little-endian):
    /// magic, `u32` node count, per node a `u32` byte length plus UTF-8
    /// bytes, `u64` offsets (node count + 1), `u32` neighbor ids, `u32`
    /// weights.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(GRAPH_MAGIC);
        out.extend_from_slice(&(self.node_count() as u32).to_le_bytes());
        for token in self.words.tokens() {
            out.extend_from_slice(&(token.len() as u32).to_le_bytes());
            out.extend_from_slice(token.as_bytes());
        }
        for &o in &self.offsets {
            out.extend_from_slice(&o.to_le_bytes());
        }
        for &v in &self.neighbors {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for &w in &self.weights {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader { bytes, pos: 0 };
        if r.take(4)? != GRAPH_MAGIC {
            return Err(Error::Format("not a DTG1 graph file".into()));
        }
        let n = r.u32()? as usize;
        let mut tokens = Vec::with_capacity(n);
        for _ in 0..n {
            let len = r.u32()? as usize;
            let s = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::Format("graph string table is not UTF-8".into()))?;
            tokens.push(s.to_owned());
        }
        let words = Vocabulary::from_sorted(tokens)
            .map_err(|_| Error::Format("graph string table is not sorted".into()))?;
        let offsets = (0..=n).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let nnz = *offsets.last().unwrap_or(&0) as usize;
        if offsets.first() != Some(&0) || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Format("graph offsets are not monotone".into()));
        }
        let neighbors = (0..nnz).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let weights = (0..nnz).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        if r.pos != bytes.len() {
            return Err(Error::Format("trailing bytes after graph".into()));
        }
        let graph = DtGraph {
            words,
            offsets,
            neighbors,
            weights,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<()> {
        let n = self.node_count() as WordId;
        for u in 0..n {
            let nb = self.neighbors(u);
            if nb.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::Format(format!("neighbor list of node {u} not sorted")));
            }
            for (&v, &w) in nb.iter().zip(self.weights(u)) {
                if v >= n || v == u || w == 0 || self.weight(v, u) != Some(w) {
                    return Err(Error::Format(format!("edge ({u}, {v}) is not a valid symmetric edge")));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = util::create_file(path)?;
        out.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        util::open_file(path)?
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// `word1 \t word2 \t weight`, one line per undirected edge.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v, w) in self.edges() {
            writeln!(out, "{}\t{}\t{}", self.words.token(u), self.words.token(v), w)?;
        }
        out.flush()
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("graph file truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Links every word to its `n_neighbors` highest-overlap words and
/// symmetrizes: an edge survives if either endpoint kept it.
///
/// Candidates come from an inverted feature → words index, so only pairs
/// sharing at least one feature are ever scored.
pub fn build_dt_graph(rankings: &ContextFeatureTable, n_neighbors: usize) -> Result<DtGraph> {
    if n_neighbors == 0 {
        return Err(Error::contract("n_neighbors must be at least 1"));
    }
    let n = rankings.len();
    let mut postings: Vec<Vec<WordId>> = vec![Vec::new(); rankings.feature_count()];
    for w in 0..n as WordId {
        for &f in rankings.feature_set(w) {
            postings[f as usize].push(w);
        }
    }

    let pruned: Vec<Vec<(WordId, u32)>> = (0..n as WordId)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::<WordId>::new()),
            |(overlap, touched), u| {
                for &f in rankings.feature_set(u) {
                    for &v in &postings[f as usize] {
                        if v == u {
                            continue;
                        }
                        if overlap[v as usize] == 0 {
                            touched.push(v);
                        }
                        overlap[v as usize] += 1;
                    }
                }
                let mut candidates: Vec<(WordId, u32)> = touched
                    .drain(..)
                    .map(|v| {
                        let w = overlap[v as usize];
                        overlap[v as usize] = 0;
                        (v, w)
                    })
                    .collect();
                select_top(&mut candidates, n_neighbors);
                candidates
            },
        )
        .collect();

    let mut lists: Vec<Vec<(WordId, u32)>> = vec![Vec::new(); n];
    for (u, kept) in pruned.iter().enumerate() {
        for &(v, w) in kept {
            lists[u].push((v, w));
            lists[v as usize].push((u as WordId, w));
        }
    }
    DtGraph::from_adjacency(rankings.words().clone(), lists)
}

/// Keeps the `n` best candidates by (weight desc, id asc).
pub(crate) fn select_top(candidates: &mut Vec<(WordId, u32)>, n: usize) {
    let order = |a: &(WordId, u32), b: &(WordId, u32)| b.1.cmp(&a.1).then(a.0.cmp(&b.0));
    if candidates.len() > n {
        candidates.select_nth_unstable_by(n - 1, order);
        candidates.truncate(n);
    }
    candidates.sort_unstable_by(order);
}
