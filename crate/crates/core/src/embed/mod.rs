//! Node embeddings for the thesaurus graph: biased second-order walks
//! followed by skip-gram training, plus a 2D projection for plotting.

pub mod alias;
pub mod embedding;
pub mod project;
pub mod sgns;
pub mod walks;

pub use alias::AliasTable;
pub use embedding::{EmbeddingArtifact, EmbeddingMatrix};
pub use project::{project_2d, ProjectedPoint};
pub use sgns::{pair_loss_and_grad, train_sgns, SgnsConfig, TrainStats};
pub use walks::{generate_walks, precompute_transitions, TransitionTable, WalkConfig, WalkCorpus};

use crate::dt::DtGraph;
use crate::error::Result;

/// Walks over `graph` and trains skip-gram vectors on them. Isolated nodes
/// get no vector.
pub fn embed_graph(graph: &DtGraph, walk: &WalkConfig, sgns: &SgnsConfig) -> Result<(EmbeddingMatrix, TrainStats)> {
    walk.validate()?;
    sgns.validate()?;
    let table = precompute_transitions(graph, walk.p, walk.q)?;
    let corpus = generate_walks(graph, &table, walk)?;
    if !corpus.isolated.is_empty() {
        log::info!("{} isolated nodes get no vector", corpus.isolated.len());
    }
    train_sgns(&corpus, graph.words(), sgns)
}
