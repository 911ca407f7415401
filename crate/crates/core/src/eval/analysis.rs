//! Misclassification reports: frequency imbalance and graph-neighbourhood
//! leakage for each wrongly predicted pair.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::experiment::EvalReport;
use crate::dt::{CountTable, DtGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub ratio_threshold: f64,
    pub top_neighbors: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            ratio_threshold: 10.0,
            top_neighbors: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorKind {
    #[serde(rename = "FP")]
    FalsePositive,
    #[serde(rename = "FN")]
    FalseNegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPair {
    pub word1: String,
    pub word2: String,
    pub error: ErrorKind,
    pub count1: Option<u64>,
    pub count2: Option<u64>,
    /// max/min of the two frequencies; `None` if either is unknown.
    pub frequency_ratio: Option<f64>,
    pub flagged: bool,
    /// Gold co-hyponyms of word2 among word1's top neighbours; `None` if
    /// word1 is not in the graph.
    pub leakage1: Option<usize>,
    /// Gold co-hyponyms of word1 among word2's top neighbours.
    pub leakage2: Option<usize>,
}

pub fn frequency_ratio(c1: u64, c2: u64) -> Option<f64> {
    if c1 == 0 || c2 == 0 {
        return None;
    }
    Some(c1.max(c2) as f64 / c1.min(c2) as f64)
}

fn leakage(graph: Option<&DtGraph>, word: &str, partner_cohyps: Option<&BTreeSet<&str>>, n: usize) -> Option<usize> {
    let g = graph?;
    let id = g.id(word)?;
    if g.is_isolated(id) {
        return None;
    }
    let Some(cohyps) = partner_cohyps else {
        return Some(0);
    };
    Some(
        g.top_neighbors(id, n)
            .into_iter()
            .filter(|&(v, _)| cohyps.contains(g.words().token(v)))
            .count(),
    )
}

/// One entry per misclassified pair, in report order. Gold co-hyponym
/// links are taken from the report's own predictions.
pub fn error_analysis(
    report: &EvalReport,
    counts: Option<&CountTable>,
    graph: Option<&DtGraph>,
    opts: &AnalysisOptions,
) -> Vec<FlaggedPair> {
    let mut cohyps: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for p in report.predictions.iter().filter(|p| p.gold == 1) {
        cohyps.entry(&p.word1).or_default().insert(&p.word2);
        cohyps.entry(&p.word2).or_default().insert(&p.word1);
    }
    report
        .predictions
        .iter()
        .filter(|p| p.gold != p.predicted)
        .map(|p| {
            let freq = |w: &str| counts.and_then(|c| c.frequency(w));
            let (count1, count2) = (freq(&p.word1), freq(&p.word2));
            let frequency_ratio = match (count1, count2) {
                (Some(a), Some(b)) => frequency_ratio(a, b),
                _ => None,
            };
            FlaggedPair {
                word1: p.word1.clone(),
                word2: p.word2.clone(),
                error: if p.predicted == 1 {
                    ErrorKind::FalsePositive
                } else {
                    ErrorKind::FalseNegative
                },
                count1,
                count2,
                frequency_ratio,
                flagged: frequency_ratio.is_some_and(|r| r > opts.ratio_threshold),
                leakage1: leakage(graph, &p.word1, cohyps.get(p.word2.as_str()), opts.top_neighbors),
                leakage2: leakage(graph, &p.word2, cohyps.get(p.word1.as_str()), opts.top_neighbors),
            }
        })
        .collect()
}

pub fn write_analysis_tsv<W: std::io::Write>(rows: &[FlaggedPair], mut out: W) -> std::io::Result<()> {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "n/a".to_owned());
    writeln!(out, "word1\tword2\terror\tcount1\tcount2\tratio\tflagged\tleakage1\tleakage2")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.word1,
            r.word2,
            match r.error {
                ErrorKind::FalsePositive => "FP",
                ErrorKind::FalseNegative => "FN",
            },
            opt(r.count1.map(|c| c.to_string())),
            opt(r.count2.map(|c| c.to_string())),
            opt(r.frequency_ratio.map(|x| format!("{x:.2}"))),
            r.flagged,
            opt(r.leakage1.map(|c| c.to_string())),
            opt(r.leakage2.map(|c| c.to_string())),
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ModelSpec;
    use crate::dt::{CountTableBuilder, Vocabulary};
    use crate::eval::experiment::*;
    use crate::eval::Relation;
    use crate::features::{CompositionOp, FeatureSource};

    #[test]
    fn screw_and_screwdriver() {
        let r = frequency_ratio(592_857, 29_748).unwrap();
        assert!((r - 19.93).abs() < 0.005);
        assert!(r > AnalysisOptions::default().ratio_threshold);
        assert_eq!(frequency_ratio(7, 7), Some(1.0));
        assert_eq!(frequency_ratio(0, 7), None);
    }

    fn pred(w1: &str, w2: &str, gold: u8, predicted: u8) -> PairPrediction {
        PairPrediction {
            index: 0,
            word1: w1.into(),
            word2: w2.into(),
            relation: if gold == 1 { Relation::Cohyp } else { Relation::Random },
            gold,
            predicted,
            fold: 0,
        }
    }

    fn report(predictions: Vec<PairPrediction>) -> EvalReport {
        let agg = Aggregate {
            accuracy: 0.0,
            f1_percent: 0.0,
            macro_f1_percent: 0.0,
            folds_used: 0,
        };
        EvalReport {
            config: ReportConfig {
                experiment: Experiment::Custom,
                model: ModelSpec::CosineP,
                features: FeatureSource::Compose(CompositionOp::Cc),
                folds: 10,
                seed: 1,
                l2_normalize: false,
                dataset: "t".into(),
                pairs_sha256: None,
                embedding_sha256: None,
            },
            n_records: predictions.len(),
            n_oov: 0,
            headline: Headline::Accuracy,
            headline_value: 0.0,
            folds: Vec::new(),
            mean: agg,
            pooled: None,
            oov: Vec::new(),
            predictions,
        }
    }

    #[test]
    fn flags_and_leakage() {
        let mut b = CountTableBuilder::new();
        for (w, c) in [("screw", 592_857), ("screwdriver", 29_748), ("owl", 5), ("crow", 5), ("hawk", 5)] {
            b.add(w, "f", c);
        }
        let counts = b.build();
        let words = Vocabulary::from_sorted(vec!["crow".into(), "hawk".into(), "owl".into()]).unwrap();
        // owl - hawk, crow - hawk
        let graph = DtGraph::from_edges(words, &[(2, 1, 3), (0, 1, 2)]).unwrap();
        let rep = report(vec![
            pred("screw", "screwdriver", 0, 1),
            pred("owl", "crow", 1, 0),
            pred("crow", "hawk", 1, 1),
        ]);
        let rows = error_analysis(&rep, Some(&counts), Some(&graph), &AnalysisOptions::default());
        assert_eq!(rows.len(), 2);
        assert!(rows[0].flagged && rows[0].error == ErrorKind::FalsePositive);
        assert_eq!(rows[0].leakage1, None);
        assert_eq!((rows[1].frequency_ratio, rows[1].flagged), (Some(1.0), false));
        // owl's neighbour hawk is a gold co-hyponym of crow
        assert_eq!(rows[1].leakage1, Some(1));
        assert_eq!(rows[1].leakage2, Some(0));
        let mut out = Vec::new();
        write_analysis_tsv(&rows, &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().contains("screw\tscrewdriver\tFP\t592857\t29748\t19.93\ttrue\tn/a\tn/a"));
    }

    #[test]
    fn unknown_words_are_not_errors() {
        let rep = report(vec![pred("x", "y", 1, 0)]);
        let rows = error_analysis(&rep, None, None, &AnalysisOptions::default());
        assert_eq!(rows[0].frequency_ratio, None);
        assert_eq!(rows[0].leakage1, None);
    }
}
