//! Pair classifiers: linear SVM, random forest, kNN and the cosine / Lin
//! threshold baselines.

pub mod dataset;
pub mod forest;
pub mod knn;
pub mod model;
pub mod similarity;
pub mod svm;
pub mod threshold;

pub use dataset::Dataset;
pub use forest::{fit_tree, train_random_forest, DecisionTree, ForestParams, Node, RandomForest};
pub use knn::{knn_predict, KnnModel};
pub use model::{ModelFile, ModelKind, ModelSpec, TrainedModel};
pub use similarity::{cosine, lin_similarity};
pub use svm::{svm_objective, train_linear_svm, LinearSvm, SvmParams};
pub use threshold::{fit_threshold, ScoreKind, ThresholdModel};
