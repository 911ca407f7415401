use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::forest::{train_random_forest, ForestParams, RandomForest};
use super::knn::KnnModel;
use super::svm::{train_linear_svm, LinearSvm, SvmParams};
use super::threshold::{ScoreKind, ThresholdModel};
use crate::error::{Error, Result};
use crate::util;

const MODEL_MAGIC: &[u8; 4] = b"CHM1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Svm,
    Rf,
    Knn,
    CosineP,
    LinP,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [ModelKind::Svm, ModelKind::Rf, ModelKind::Knn, ModelKind::CosineP, ModelKind::LinP];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::Rf => "rf",
            ModelKind::Knn => "knn",
            ModelKind::CosineP => "cosinep",
            ModelKind::LinP => "linp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Format(format!("unknown model '{s}' (expected svm, rf, knn, cosinep or linp)")))
    }
}

/// A model family plus its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Svm(SvmParams),
    Rf(ForestParams),
    Knn { k: usize },
    #[serde(rename = "cosinep")]
    CosineP,
    #[serde(rename = "linp")]
    LinP,
}

impl ModelSpec {
    /// Default hyperparameters of a family, seeded with `seed`.
    pub fn defaults(kind: ModelKind, seed: u64) -> Self {
        match kind {
            ModelKind::Svm => ModelSpec::Svm(SvmParams { seed, ..Default::default() }),
            ModelKind::Rf => ModelSpec::Rf(ForestParams { seed, ..Default::default() }),
            ModelKind::Knn => ModelSpec::Knn { k: 5 },
            ModelKind::CosineP => ModelSpec::CosineP,
            ModelKind::LinP => ModelSpec::LinP,
        }
    }

    /// Same spec with its random seed replaced (no-op for deterministic models).
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            ModelSpec::Svm(p) => ModelSpec::Svm(SvmParams { seed, ..p }),
            ModelSpec::Rf(p) => ModelSpec::Rf(ForestParams { seed, ..p }),
            other => other,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Svm(_) => ModelKind::Svm,
            ModelSpec::Rf(_) => ModelKind::Rf,
            ModelSpec::Knn { .. } => ModelKind::Knn,
            ModelSpec::CosineP => ModelKind::CosineP,
            ModelSpec::LinP => ModelKind::LinP,
        }
    }

    pub fn fit(&self, data: &Dataset) -> Result<TrainedModel> {
        let model = match *self {
            ModelSpec::Svm(p) => TrainedModel::Svm(train_linear_svm(data, p)?),
            ModelSpec::Rf(p) => TrainedModel::Forest(train_random_forest(data, p)?),
            ModelSpec::Knn { k } => TrainedModel::Knn(KnnModel::new(data.clone(), k)?),
            ModelSpec::CosineP | ModelSpec::LinP => {
                let kind = if *self == ModelSpec::CosineP { ScoreKind::Cosine } else { ScoreKind::Lin };
                let rows = (0..data.len()).map(|i| (ThresholdModel::score(kind, data.row(i)), data.label(i)));
                TrainedModel::Threshold(ThresholdModel::fit(kind, rows)?)
            }
        };
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedModel {
    Svm(LinearSvm),
    Forest(RandomForest),
    Knn(KnnModel),
    Threshold(ThresholdModel),
}

impl TrainedModel {
    pub fn predict(&self, x: &[f64]) -> u8 {
        match self {
            TrainedModel::Svm(m) => m.predict(x),
            TrainedModel::Forest(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Threshold(m) => m.predict(x),
        }
    }

    pub fn predict_all(&self, data: &Dataset) -> Vec<u8> {
        data.rows().map(|x| self.predict(x)).collect()
    }
}

/// Self-describing model file: the spec (family, hyperparameters, seed),
/// the input width, and the fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub spec: ModelSpec,
    pub dim: usize,
    pub model: TrainedModel,
}

impl ModelFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        util::write_tagged_cbor(path, MODEL_MAGIC, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        util::read_tagged_cbor(path, MODEL_MAGIC)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                vec![s + 0.01 * i as f64, 1.0, s * 0.5 + 0.02 * i as f64, 1.0]
            })
            .collect();
        Dataset::from_rows(&rows, (0..20).map(|i| (i % 2 == 0) as u8).collect()).unwrap()
    }

    #[test]
    fn kinds_parse_case_insensitively() {
        assert_eq!("CosineP".parse::<ModelKind>().unwrap(), ModelKind::CosineP);
        assert!("tree".parse::<ModelKind>().is_err());
    }

    #[test]
    fn saved_models_predict_identically() {
        let d = data();
        let dir = tempfile::tempdir().unwrap();
        for kind in ModelKind::ALL {
            let spec = ModelSpec::defaults(kind, 3);
            let spec = match spec {
                ModelSpec::Rf(p) => ModelSpec::Rf(ForestParams { n_trees: 7, ..p }),
                s => s,
            };
            let model = spec.fit(&d).unwrap();
            let file = ModelFile { spec, dim: d.dim(), model };
            let path = dir.path().join(format!("{kind}.model"));
            file.save(&path).unwrap();
            let back = ModelFile::load(&path).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.model.predict_all(&d), file.model.predict_all(&d));
        }
    }

    #[test]
    fn wrong_magic_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.model");
        std::fs::write(&path, b"NOPE....").unwrap();
        assert!(matches!(ModelFile::load(&path), Err(Error::Format(_))));
    }
}
