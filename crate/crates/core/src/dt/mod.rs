//! Distributional-thesaurus construction: count ingestion, feature
//! association ranking, and the top-overlap word graph.

pub mod counts;
pub mod graph;
pub mod rankings;

pub use counts::{
    ingest_path, ingest_reader, CountTable, CountTableBuilder, FeatureId, IngestOptions, IngestReport, Vocabulary,
    WordId,
};
pub use graph::{build_dt_graph, DtGraph};
pub use rankings::{
    association_score, build_feature_rankings, overlap_similarity, overlap_similarity_by_word, ContextFeatureTable,
};
