//! Benchmark pair datasets, cross-validated experiments, metrics, dataset
//! overlap, error analysis and a synthetic benchmark.

pub mod analysis;
pub mod experiment;
pub mod folds;
pub mod metrics;
pub mod overlap;
pub mod pairs;
pub mod synth;

pub use analysis::{error_analysis, frequency_ratio, write_analysis_tsv, AnalysisOptions, ErrorKind, FlaggedPair};
pub use experiment::{
    run_experiment, run_experiment_observed, Aggregate, EvalReport, Experiment, ExperimentConfig, ExperimentInputs,
    FoldObserver, FoldResult, Headline, PairPrediction, ReportConfig,
};
pub use folds::{stratified_kfold, FoldSplit};
pub use metrics::{metrics, Metrics};
pub use overlap::{dataset_overlap, Overlap};
pub use pairs::{load_pairs, read_pairs, LabeledPairDataset, PairFormat, PairRecord, Relation};
pub use synth::{generate, SynthConfig, SynthCorpus};
