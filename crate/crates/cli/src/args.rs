use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cohypo_core::classify::{ForestParams, ModelKind, ModelSpec, SvmParams};
use cohypo_core::embed::{SgnsConfig, WalkConfig};
use cohypo_core::eval::Experiment;
use cohypo_core::features::CompositionOp;
use serde::Serialize;

/// Co-hyponymy detection from distributional-thesaurus graph embeddings.
///
/// Defaults marked "(reference setup)" follow the published configuration
/// of the method; the rest are conventional choices of the underlying
/// algorithms and can be changed freely.
#[derive(Debug, Parser)]
#[command(name = "cohypo", version, max_term_width = 100)]
pub struct Cli {
    /// Worker threads; 0 uses every core. With 1 thread all outputs are
    /// byte-for-byte reproducible.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// error, warn, info, debug or trace
    #[arg(long, global = true, default_value = "info")]
    pub log_level: String,

    /// Base directory for relative paths.
    #[arg(long, global = true, env = "COHYPO_DATA_DIR")]
    pub data_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read `word \t feature \t count` records into a binary count table
    Ingest(IngestArgs),
    /// Rank context features and build the thesaurus graph
    BuildGraph(BuildGraphArgs),
    /// Learn node vectors from biased random walks over the graph
    Embed(EmbedArgs),
    /// Project vectors onto their first two principal axes
    Project(ProjectArgs),
    /// Write the composed feature vector of every pair
    Compose(ComposeArgs),
    /// Fit a pair classifier on a whole dataset
    Train(TrainArgs),
    /// Cross-validate a classifier on a pair dataset
    Evaluate(EvaluateArgs),
    /// Share of word pairs two datasets have in common
    Overlap(OverlapArgs),
    /// List misclassified pairs with frequency and neighbourhood notes
    AnalyzeErrors(AnalyzeArgs),
    /// Generate the planted-taxonomy benchmark
    Synth(SynthArgs),
    /// Run ingest, build-graph, embed and evaluate from a config file
    Run(RunArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IngestArgs {
    /// Tab-separated counts, optionally gzip-compressed
    #[arg(long)]
    pub counts: PathBuf,
    /// Binary count table
    #[arg(long)]
    pub out: PathBuf,
    /// Skip malformed lines with a warning instead of failing
    #[arg(long)]
    pub skip_bad_lines: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildGraphArgs {
    /// Count table from `ingest`, or a raw counts TSV
    #[arg(long)]
    pub counts: PathBuf,
    /// Binary graph
    #[arg(long)]
    pub out: PathBuf,
    /// Top-ranked context features kept per word (reference setup)
    #[arg(long, default_value_t = 1000)]
    pub k_features: usize,
    /// Neighbours kept per word before symmetrization (reference setup)
    #[arg(long, default_value_t = 200)]
    pub n_neighbors: usize,
    /// Also write the edge list as `word1 \t word2 \t weight`
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WalkArgs {
    /// Nodes per walk (reference setup)
    #[arg(long, default_value_t = 80)]
    pub walk_length: usize,
    /// Walks started from every node (reference setup)
    #[arg(long, default_value_t = 10)]
    pub walks_per_node: usize,
    /// Return parameter; 1 with q = 1 gives plain weighted walks (reference setup)
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// In-out parameter (reference setup)
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SgnsArgs {
    /// Vector dimension (reference setup)
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    /// Context radius (reference setup)
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    /// Negative samples per positive pair (skip-gram convention)
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    /// Passes over the walk corpus (skip-gram convention)
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    /// Initial learning rate, decayed linearly (skip-gram convention)
    #[arg(long, default_value_t = 0.025)]
    pub lr: f64,
    /// Final learning rate (skip-gram convention)
    #[arg(long, default_value_t = 0.0001)]
    pub lr_min: f64,
    /// Exponent applied to unigram counts of the noise distribution (skip-gram convention)
    #[arg(long, default_value_t = 0.75)]
    pub noise_exponent: f64,
    /// Drop pairs whose context token equals the center token
    #[arg(long)]
    pub skip_self_pairs: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedArgs {
    /// Graph from `build-graph`
    #[arg(long)]
    pub graph: PathBuf,
    /// Vectors in word2vec text format; a binary copy with both matrices
    /// and the training settings is written to `<out>.bin`
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub sgns: SgnsArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl EmbedArgs {
    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            walk_length: self.walk.walk_length,
            walks_per_node: self.walk.walks_per_node,
            p: self.walk.p,
            q: self.walk.q,
            seed: self.seed,
        }
    }

    pub fn sgns_config(&self, threads: usize) -> SgnsConfig {
        SgnsConfig {
            dim: self.sgns.dim,
            window: self.sgns.window,
            negatives: self.sgns.negatives,
            epochs: self.sgns.epochs,
            lr_start: self.sgns.lr,
            lr_end: self.sgns.lr_min,
            noise_exponent: self.sgns.noise_exponent,
            seed: self.seed,
            threads,
            skip_self_pairs: self.sgns.skip_self_pairs,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProjectArgs {
    /// Embedding, text or binary
    #[arg(long)]
    pub emb: PathBuf,
    /// Output TSV `word \t x \t y`
    #[arg(long)]
    pub out: PathBuf,
    /// File with one word per line; defaults to the whole vocabulary
    #[arg(long)]
    pub words_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PairInput {
    /// Labelled pairs
    #[arg(long)]
    pub pairs: PathBuf,
    /// Column layout: tsv, bless, root9, weeds, or a spec such as
    /// `w1=0,w2=3,rel=2,strip-pos,header,ignore=attri|event`
    #[arg(long, default_value = "tsv")]
    pub pair_format: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComposeArgs {
    #[arg(long)]
    pub emb: PathBuf,
    #[command(flatten)]
    pub input: PairInput,
    /// diff, cc, add, mul or sing
    #[arg(long, default_value = "cc")]
    pub op: CompositionOp,
    /// Scale word vectors to unit length before composing
    #[arg(long)]
    pub l2_normalize: bool,
    /// Output TSV `word1 \t word2 \t relation \t label \t x1 ... xn`
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// svm, rf, knn, cosinep (cosine threshold) or linp (Lin-similarity threshold)
    #[arg(long, default_value = "rf")]
    pub model: ModelKind,
    /// Pair composition: diff, cc, add, mul or sing
    #[arg(long, default_value = "cc")]
    pub op: CompositionOp,
    /// Neighbours voting in kNN
    #[arg(long, default_value_t = 5)]
    pub knn_k: usize,
    /// SVM regularization strength
    #[arg(long, default_value_t = 1e-4)]
    pub svm_lambda: f64,
    /// SVM passes over the training data
    #[arg(long, default_value_t = 100)]
    pub svm_epochs: usize,
    /// Trees in the random forest
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Tree depth cap; unlimited by default
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Features tried per split; floor(sqrt(d)) by default
    #[arg(long)]
    pub mtry: Option<usize>,
    /// Scale word vectors to unit length before composing
    #[arg(long)]
    pub l2_normalize: bool,
}

impl ModelArgs {
    pub fn spec(&self, seed: u64) -> ModelSpec {
        match self.model {
            ModelKind::Svm => ModelSpec::Svm(SvmParams {
                lambda: self.svm_lambda,
                epochs: self.svm_epochs,
                seed,
            }),
            ModelKind::Rf => ModelSpec::Rf(ForestParams {
                n_trees: self.trees,
                max_depth: self.max_depth,
                mtry: self.mtry,
                seed,
            }),
            ModelKind::Knn => ModelSpec::Knn { k: self.knn_k },
            ModelKind::CosineP => ModelSpec::CosineP,
            ModelKind::LinP => ModelSpec::LinP,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Embedding (not needed for linp)
    #[arg(long)]
    pub emb: Option<PathBuf>,
    /// Count table or counts TSV (needed for linp)
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Top features per word for Lin similarity
    #[arg(long, default_value_t = 1000)]
    pub k_features: usize,
    #[command(flatten)]
    pub input: PairInput,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Model file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    /// exp1, exp2-random, exp2-hyper, exp3-random, exp3-mero, exp3-hyper or custom
    #[arg(long, default_value = "custom")]
    pub experiment: Experiment,
    #[command(flatten)]
    pub input: PairInput,
    /// Embedding (not needed for linp)
    #[arg(long)]
    pub emb: Option<PathBuf>,
    /// Count table or counts TSV (needed for linp)
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Top features per word for Lin similarity (reference setup)
    #[arg(long, default_value_t = 1000)]
    pub k_features: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Cross-validation folds (reference setup)
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// JSON report
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OverlapArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long, default_value = "tsv")]
    pub a_format: String,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value = "tsv")]
    pub b_format: String,
    /// Also write the result as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Report from `evaluate`
    #[arg(long)]
    pub report: PathBuf,
    /// Count table or counts TSV, for word frequencies
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Graph, for neighbourhood leakage
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Frequency ratio above which a pair is flagged
    #[arg(long, default_value_t = 10.0)]
    pub ratio_threshold: f64,
    /// Graph neighbours inspected per word (reference setup)
    #[arg(long, default_value_t = 200)]
    pub top_neighbors: usize,
    /// Output TSV; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    /// Directory receiving counts.tsv and pairs.tsv
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub classes: usize,
    #[arg(long, default_value_t = 5)]
    pub superclasses: usize,
    #[arg(long, default_value_t = 22)]
    pub members_per_class: usize,
    /// Words outside the taxonomy, used as random relata
    #[arg(long, default_value_t = 40)]
    pub fillers: usize,
    /// Share of a member's feature tokens drawn from its class
    #[arg(long, default_value_t = 0.8)]
    pub class_share: f64,
    #[arg(long, default_value_t = 2000)]
    pub member_tokens: usize,
    #[arg(long, default_value_t = 8000)]
    pub hub_tokens: usize,
    /// Pairs per relation (cohyp, hyper, random)
    #[arg(long, default_value_t = 440)]
    pub pairs_per_relation: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// Pipeline config with [ingest], [build-graph], [embed] and
    /// [evaluate] or [evaluate.NAME] sections of `key = value` lines
    #[arg(long)]
    pub config: PathBuf,
    /// Rebuild every stage even when its cached output is current
    #[arg(long)]
    pub force: bool,
}
