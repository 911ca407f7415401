//! Cross-validated pair classification runs and their reports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::stratified_kfold;
use super::metrics::{from_counts, metrics, Metrics};
use super::pairs::{LabeledPairDataset, Relation};
use crate::classify::{ModelKind, ModelSpec};
use crate::dt::ContextFeatureTable;
use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::features::{featurize_dataset, featurize_lin, CompositionOp, FeatureSource, FeaturizedPairs, OovPair};
use crate::util::{self, mix_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Headline {
    Accuracy,
    F1,
}

/// Named evaluation protocols. Each one fixes which relations are kept and
/// which metric is headlined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "exp1")]
    Exp1,
    #[serde(rename = "exp2-random")]
    Exp2Random,
    #[serde(rename = "exp2-hyper")]
    Exp2Hyper,
    #[serde(rename = "exp3-random")]
    Exp3Random,
    #[serde(rename = "exp3-mero")]
    Exp3Mero,
    #[serde(rename = "exp3-hyper")]
    Exp3Hyper,
    #[serde(rename = "custom")]
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Exp1,
        Experiment::Exp2Random,
        Experiment::Exp2Hyper,
        Experiment::Exp3Random,
        Experiment::Exp3Mero,
        Experiment::Exp3Hyper,
        Experiment::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2Random => "exp2-random",
            Experiment::Exp2Hyper => "exp2-hyper",
            Experiment::Exp3Random => "exp3-random",
            Experiment::Exp3Mero => "exp3-mero",
            Experiment::Exp3Hyper => "exp3-hyper",
            Experiment::Custom => "custom",
        }
    }

    /// Relations kept from the pair file.
    pub fn relations(self) -> &'static [Relation] {
        match self {
            Experiment::Exp1 | Experiment::Custom => &Relation::ALL,
            Experiment::Exp2Random | Experiment::Exp3Random => &[Relation::Cohyp, Relation::Random],
            Experiment::Exp2Hyper | Experiment::Exp3Hyper => &[Relation::Cohyp, Relation::Hyper],
            Experiment::Exp3Mero => &[Relation::Cohyp, Relation::Mero],
        }
    }

    pub fn headline(self) -> Headline {
        match self {
            Experiment::Exp2Random | Experiment::Exp2Hyper => Headline::F1,
            _ => Headline::Accuracy,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelSpec,
    /// Ignored by the threshold baselines, which always use their own
    /// features (concatenation for cosineP, Lin for linP).
    pub op: CompositionOp,
    pub folds: usize,
    pub seed: u64,
    pub l2_normalize: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, model: ModelSpec, op: CompositionOp, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            model,
            op,
            folds: 10,
            seed,
            l2_normalize: false,
        }
    }

    pub fn feature_source(&self) -> FeatureSource {
        match self.model.kind() {
            ModelKind::CosineP => FeatureSource::Compose(CompositionOp::Cc),
            ModelKind::LinP => FeatureSource::Lin,
            _ => FeatureSource::Compose(self.op),
        }
    }
}

/// Everything a run reads. Hashes are copied into the report as provenance.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExperimentInputs<'a> {
    pub pairs: Option<&'a LabeledPairDataset>,
    pub embedding: Option<&'a EmbeddingMatrix>,
    pub rankings: Option<&'a ContextFeatureTable>,
    pub pairs_hash: Option<&'a str>,
    pub embedding_hash: Option<&'a str>,
}

/// Sees which dataset records each fold trains on and tests on.
pub trait FoldObserver: Sync {
    fn on_train(&self, fold: usize, records: &[usize]);
    fn on_test(&self, fold: usize, records: &[usize]);
}

struct NoObserver;

impl FoldObserver for NoObserver {
    fn on_train(&self, _: usize, _: &[usize]) {}
    fn on_test(&self, _: usize, _: &[usize]) {}
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    /// In-vocabulary test pairs.
    pub n_test: usize,
    /// Test-fold pairs dropped as out of vocabulary.
    pub n_oov: usize,
    /// `None` when every test pair of the fold was out of vocabulary.
    pub metrics: Option<Metrics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub accuracy: f64,
    pub f1_percent: f64,
    pub macro_f1_percent: f64,
    pub folds_used: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPrediction {
    pub index: usize,
    pub word1: String,
    pub word2: String,
    pub relation: Relation,
    pub gold: u8,
    pub predicted: u8,
    pub fold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub experiment: Experiment,
    pub model: ModelSpec,
    pub features: FeatureSource,
    pub folds: usize,
    pub seed: u64,
    pub l2_normalize: bool,
    pub dataset: String,
    pub pairs_sha256: Option<String>,
    pub embedding_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ReportConfig,
    pub n_records: usize,
    pub n_oov: usize,
    pub headline: Headline,
    /// Headline metric averaged over folds (accuracy in [0,1] or F1 in percent).
    pub headline_value: f64,
    pub folds: Vec<FoldResult>,
    /// Arithmetic mean of the per-fold values.
    pub mean: Aggregate,
    /// Metrics over all test predictions taken together.
    pub pooled: Option<Metrics>,
    pub oov: Vec<OovPair>,
    pub predictions: Vec<PairPrediction>,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(format!("cannot encode report: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        use std::io::Write;
        let mut out = util::create_file(path)?;
        writeln!(out, "{}", self.to_json()?).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let reader = util::open_file(path)?;
        serde_json::from_reader(reader).map_err(|e| Error::Format(format!("{}: not a report: {e}", path.display())))
    }

    /// Per-fold table plus aggregates, for terminals.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} | {} | {} | {} folds | {} pairs, {} oov\n",
            self.config.experiment,
            self.config.model.kind(),
            self.config.features,
            self.config.folds,
            self.n_records,
            self.n_oov
        );
        s.push_str("fold  n_test  n_oov  accuracy  f1%\n");
        for f in &self.folds {
            match &f.metrics {
                Some(m) => s.push_str(&format!(
                    "{:>4}  {:>6}  {:>5}  {:>8.4}  {:>6.2}\n",
                    f.fold, f.n_test, f.n_oov, m.accuracy, m.f1_percent
                )),
                None => s.push_str(&format!("{:>4}  {:>6}  {:>5}  {:>8}  {:>6}\n", f.fold, f.n_test, f.n_oov, "-", "-")),
            }
        }
        s.push_str(&format!(
            "mean  accuracy {:.4}  f1% {:.2}  macro-f1% {:.2}\n",
            self.mean.accuracy, self.mean.f1_percent, self.mean.macro_f1_percent
        ));
        if let Some(p) = &self.pooled {
            s.push_str(&format!("pooled accuracy {:.4}  f1% {:.2}\n", p.accuracy, p.f1_percent));
        }
        s
    }
}

fn featurize(cfg: &ExperimentConfig, pairs: &LabeledPairDataset, inputs: &ExperimentInputs) -> Result<FeaturizedPairs> {
    match cfg.feature_source() {
        FeatureSource::Lin => {
            let rankings = inputs
                .rankings
                .ok_or_else(|| Error::contract("the linP model needs feature rankings (a counts file)"))?;
            featurize_lin(pairs, rankings)
        }
        FeatureSource::Compose(op) => {
            let emb = inputs
                .embedding
                .ok_or_else(|| Error::contract("this model needs an embedding"))?;
            featurize_dataset(pairs, emb, op, cfg.l2_normalize)
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, inputs: &ExperimentInputs) -> Result<EvalReport> {
    run_experiment_observed(cfg, inputs, &NoObserver)
}

/// Folds are split over the whole filtered dataset; pairs with a word
/// missing from the embedding are then dropped from both the training and
/// the test side of every fold and counted per fold.
pub fn run_experiment_observed(
    cfg: &ExperimentConfig,
    inputs: &ExperimentInputs,
    observer: &dyn FoldObserver,
) -> Result<EvalReport> {
    let all = inputs.pairs.ok_or_else(|| Error::contract("no pair dataset given"))?;
    let pairs = all.with_relations(cfg.experiment.relations());
    if pairs.is_empty() {
        return Err(Error::contract(format!(
            "no pairs of '{}' match experiment {}",
            all.name(),
            cfg.experiment
        )));
    }
    let feats = featurize(cfg, &pairs, inputs)?;
    let split = stratified_kfold(&pairs.labels(), cfg.folds, cfg.seed)?;
    let assign = split.assignments();
    let mut oov_per_fold = vec![0usize; cfg.folds];
    for o in &feats.oov {
        oov_per_fold[assign[o.index]] += 1;
    }

    let fold_outputs: Vec<(FoldResult, Vec<(usize, u8)>)> = (0..cfg.folds)
        .into_par_iter()
        .map(|fold| -> Result<_> {
            let (train_rows, test_rows): (Vec<usize>, Vec<usize>) =
                (0..feats.records.len()).partition(|&r| assign[feats.records[r]] != fold);
            let train_records: Vec<usize> = train_rows.iter().map(|&r| feats.records[r]).collect();
            observer.on_train(fold, &train_records);
            let model = cfg
                .model
                .with_seed(mix_seed(cfg.seed, fold as u64 + 1))
                .fit(&feats.data.subset(&train_rows))?;
            let test_records: Vec<usize> = test_rows.iter().map(|&r| feats.records[r]).collect();
            observer.on_test(fold, &test_records);
            let test = feats.data.subset(&test_rows);
            let predicted = model.predict_all(&test);
            let fold_metrics = if test.is_empty() {
                None
            } else {
                Some(metrics(&predicted, test.labels())?)
            };
            let result = FoldResult {
                fold,
                n_train: train_rows.len(),
                n_test: test_rows.len(),
                n_oov: oov_per_fold[fold],
                metrics: fold_metrics,
            };
            Ok((result, test_records.into_iter().zip(predicted).collect()))
        })
        .collect::<Result<_>>()?;

    let mut folds = Vec::with_capacity(cfg.folds);
    let mut predictions = Vec::new();
    for (result, preds) in fold_outputs {
        for (index, predicted) in preds {
            let r = &pairs.records()[index];
            predictions.push(PairPrediction {
                index,
                word1: r.word1.clone(),
                word2: r.word2.clone(),
                relation: r.relation,
                gold: r.label(),
                predicted,
                fold: result.fold,
            });
        }
        folds.push(result);
    }
    predictions.sort_by_key(|p| p.index);

    let used: Vec<&Metrics> = folds.iter().filter_map(|f| f.metrics.as_ref()).collect();
    let mean_of = |get: fn(&Metrics) -> f64| {
        if used.is_empty() {
            0.0
        } else {
            used.iter().map(|m| get(m)).sum::<f64>() / used.len() as f64
        }
    };
    let mean = Aggregate {
        accuracy: mean_of(|m| m.accuracy),
        f1_percent: mean_of(|m| m.f1_percent),
        macro_f1_percent: mean_of(|m| m.macro_f1_percent),
        folds_used: used.len(),
    };
    let pooled = (!used.is_empty()).then(|| {
        let sum = |get: fn(&Metrics) -> usize| used.iter().map(|m| get(m)).sum::<usize>();
        from_counts(sum(|m| m.tp), sum(|m| m.fp), sum(|m| m.tn), sum(|m| m.fn_))
    });
    let headline = cfg.experiment.headline();
    Ok(EvalReport {
        config: ReportConfig {
            experiment: cfg.experiment,
            model: cfg.model,
            features: cfg.feature_source(),
            folds: cfg.folds,
            seed: cfg.seed,
            l2_normalize: cfg.l2_normalize,
            dataset: pairs.name().to_owned(),
            pairs_sha256: inputs.pairs_hash.map(str::to_owned),
            embedding_sha256: inputs.embedding_hash.map(str::to_owned),
        },
        n_records: pairs.len(),
        n_oov: feats.oov.len(),
        headline,
        headline_value: match headline {
            Headline::Accuracy => mean.accuracy,
            Headline::F1 => mean.f1_percent,
        },
        folds,
        mean,
        pooled,
        oov: feats.oov,
        predictions,
    })
}
