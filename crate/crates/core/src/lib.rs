//! Co-hyponymy detection over a distributional thesaurus.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`dt`] aggregates `(word, context feature, count)` records, ranks each
//!    word's features by LMI and links words that share top-ranked features.
//! 2. [`embed`] walks the resulting graph with second-order (p, q)-biased
//!    random walks and trains skip-gram vectors with negative sampling.
//! 3. [`features`] composes two word vectors into one classifier input.
//! 4. [`classify`] holds the supervised and threshold models.
//! 5. [`eval`] loads labelled word pairs, runs stratified cross-validation
//!    and produces reports, dataset overlaps and error analyses.

pub mod classify;
pub mod dt;
pub mod embed;
pub mod error;
pub mod eval;
pub mod features;
pub mod util;

pub use error::{Error, Result};
