use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use cohypo_core::classify::{ModelFile, ModelKind};
use cohypo_core::dt::{
    build_dt_graph, build_feature_rankings, ingest_path, ContextFeatureTable, CountTable, DtGraph, IngestOptions,
};
use cohypo_core::embed::{embed_graph, project_2d, EmbeddingArtifact, EmbeddingMatrix};
use cohypo_core::eval::{
    dataset_overlap, error_analysis, generate, load_pairs, run_experiment, write_analysis_tsv, AnalysisOptions,
    EvalReport, ExperimentConfig, ExperimentInputs, LabeledPairDataset, PairFormat, SynthConfig,
};
use cohypo_core::features::{featurize_dataset, featurize_lin, CompositionOp, FeaturizedPairs};
use cohypo_core::util::{self, sha256_file};
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub data_dir: Option<PathBuf>,
    /// Resolved worker count (never 0).
    pub threads: usize,
}

impl Context {
    pub fn path(&self, p: &Path) -> PathBuf {
        match &self.data_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }
}

/// Written to `<output>.config.json` next to each primary output.
#[derive(Serialize)]
struct Provenance<'a, A: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    threads: usize,
    args: &'a A,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".config.json");
    PathBuf::from(name)
}

fn hashes(paths: &[&Path]) -> CliResult<BTreeMap<String, String>> {
    paths
        .iter()
        .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
        .collect()
}

fn write_provenance<A: Serialize>(
    ctx: &Context,
    command: &str,
    args: &A,
    inputs: &[&Path],
    outputs: &[&Path],
) -> CliResult<()> {
    let Some(primary) = outputs.first() else {
        return Ok(());
    };
    let record = Provenance {
        tool: "cohypo",
        version: env!("CARGO_PKG_VERSION"),
        command,
        threads: ctx.threads,
        args,
        inputs: hashes(inputs)?,
        outputs: hashes(outputs)?,
    };
    let path = sidecar_path(primary);
    let mut out = util::create_file(&path)?;
    let text = serde_json::to_string_pretty(&record).map_err(|e| CliError::new(crate::error::Category::Other, e.to_string()))?;
    writeln!(out, "{text}").and_then(|_| out.flush()).map_err(|e| cohypo_core::Error::io(&path, e))?;
    Ok(())
}

fn load_dataset(ctx: &Context, input: &PairInput) -> CliResult<(LabeledPairDataset, PathBuf)> {
    let path = ctx.path(&input.pairs);
    let format: PairFormat = input.pair_format.parse()?;
    Ok((load_pairs(&path, &format)?, path))
}

fn rankings_from(counts: &Path, k_features: usize) -> CliResult<ContextFeatureTable> {
    let table = CountTable::load_or_ingest(counts)?;
    Ok(build_feature_rankings(&table, k_features)?)
}

fn write_with<F>(path: &Path, f: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let mut out = util::create_file(path)?;
    f(&mut out).and_then(|_| out.flush()).map_err(|e| cohypo_core::Error::io(path, e))?;
    Ok(())
}

pub fn ingest(ctx: &Context, args: &IngestArgs) -> CliResult<()> {
    let (input, out) = (ctx.path(&args.counts), ctx.path(&args.out));
    let (table, report) = ingest_path(
        &input,
        IngestOptions {
            skip_bad_lines: args.skip_bad_lines,
        },
    )?;
    log::info!(
        "ingested {} records from {} lines ({} skipped): {} words, {} features",
        report.records,
        report.lines,
        report.skipped.len(),
        table.words().len(),
        table.features().len()
    );
    table.save(&out)?;
    write_provenance(ctx, "ingest", args, &[&input], &[&out])
}

pub fn build_graph(ctx: &Context, args: &BuildGraphArgs) -> CliResult<()> {
    let (input, out) = (ctx.path(&args.counts), ctx.path(&args.out));
    let rankings = rankings_from(&input, args.k_features)?;
    let graph = build_dt_graph(&rankings, args.n_neighbors)?;
    log::info!("graph: {} nodes, {} edges", graph.node_count(), graph.edge_count());
    graph.save(&out)?;
    let mut outputs = vec![out.clone()];
    if let Some(tsv) = &args.tsv {
        let tsv = ctx.path(tsv);
        write_with(&tsv, |w| graph.write_tsv(w))?;
        outputs.push(tsv);
    }
    let outputs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
    write_provenance(ctx, "build-graph", args, &[&input], &outputs)
}

pub fn embed(ctx: &Context, args: &EmbedArgs) -> CliResult<()> {
    let (input, out) = (ctx.path(&args.graph), ctx.path(&args.out));
    let graph = DtGraph::load(&input)?;
    let walk = args.walk_config();
    let sgns = args.sgns_config(ctx.threads);
    let (matrix, stats) = embed_graph(&graph, &walk, &sgns)?;
    log::info!(
        "embedded {} words, {} pairs per epoch, epoch losses {:?}",
        matrix.len(),
        stats.pairs_per_epoch,
        stats.epoch_mean_loss
    );
    let mut w = util::create_file(&out)?;
    matrix.write_text(&mut w)?;
    w.flush().map_err(|e| cohypo_core::Error::io(&out, e))?;
    drop(w);
    let sidecar = embedding_sidecar(&out);
    EmbeddingArtifact { walk, sgns, matrix }.save(&sidecar)?;
    let outputs: Vec<&Path> = vec![&out, &sidecar];
    write_provenance(ctx, "embed", args, &[&input], &outputs)
}

/// Binary companion of a text embedding: both matrices plus the walk and
/// training settings.
pub fn embedding_sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".bin");
    PathBuf::from(name)
}

pub fn project(ctx: &Context, args: &ProjectArgs) -> CliResult<()> {
    let (input, out) = (ctx.path(&args.emb), ctx.path(&args.out));
    let emb = EmbeddingMatrix::load(&input)?;
    let mut inputs = vec![input.clone()];
    let words: Vec<String> = match &args.words_file {
        Some(list) => {
            let list = ctx.path(list);
            let reader = util::open_file(&list)?;
            let mut words = Vec::new();
            for line in reader.lines() {
                let line = line.map_err(|e| cohypo_core::Error::io(&list, e))?;
                if !line.trim().is_empty() {
                    words.push(line.trim().to_owned());
                }
            }
            inputs.push(list);
            words
        }
        None => emb.words().to_vec(),
    };
    let points = project_2d(&emb, &words)?;
    write_with(&out, |w| {
        for p in &points {
            writeln!(w, "{}\t{}\t{}", p.word, p.x, p.y)?;
        }
        Ok(())
    })?;
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    write_provenance(ctx, "project", args, &inputs, &[&out])
}

fn log_oov(f: &FeaturizedPairs) {
    if !f.oov.is_empty() {
        log::warn!("{} pairs skipped as out of vocabulary", f.oov.len());
    }
}

pub fn compose(ctx: &Context, args: &ComposeArgs) -> CliResult<()> {
    let (emb_path, out) = (ctx.path(&args.emb), ctx.path(&args.out));
    let emb = EmbeddingMatrix::load(&emb_path)?;
    let (pairs, pairs_path) = load_dataset(ctx, &args.input)?;
    let feats = featurize_dataset(&pairs, &emb, args.op, args.l2_normalize)?;
    log_oov(&feats);
    write_with(&out, |w| {
        for (row, &idx) in feats.records.iter().enumerate() {
            let r = &pairs.records()[idx];
            write!(w, "{}\t{}\t{}\t{}", r.word1, r.word2, r.relation, r.label())?;
            for x in feats.data.row(row) {
                write!(w, "\t{x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;
    write_provenance(ctx, "compose", args, &[&emb_path, &pairs_path], &[&out])
}

/// Features for a model, read from whichever input it needs.
fn features_for(
    ctx: &Context,
    model: &ModelArgs,
    emb: Option<&PathBuf>,
    counts: Option<&PathBuf>,
    k_features: usize,
    pairs: &LabeledPairDataset,
    inputs: &mut Vec<PathBuf>,
) -> CliResult<FeaturizedPairs> {
    if model.model == ModelKind::LinP {
        let counts = ctx.path(counts.ok_or_else(|| CliError::usage("--counts is required for linp"))?);
        let rankings = rankings_from(&counts, k_features)?;
        inputs.push(counts);
        return Ok(featurize_lin(pairs, &rankings)?);
    }
    let emb_path = ctx.path(emb.ok_or_else(|| CliError::usage("--emb is required for this model"))?);
    let emb = EmbeddingMatrix::load(&emb_path)?;
    inputs.push(emb_path);
    let op = if model.model == ModelKind::CosineP { CompositionOp::Cc } else { model.op };
    Ok(featurize_dataset(pairs, &emb, op, model.l2_normalize)?)
}

pub fn train(ctx: &Context, args: &TrainArgs) -> CliResult<()> {
    let out = ctx.path(&args.out);
    let (pairs, pairs_path) = load_dataset(ctx, &args.input)?;
    let mut inputs = vec![pairs_path];
    let feats = features_for(
        ctx,
        &args.model,
        args.emb.as_ref(),
        args.counts.as_ref(),
        args.k_features,
        &pairs,
        &mut inputs,
    )?;
    log_oov(&feats);
    let spec = args.model.spec(args.seed);
    let model = spec.fit(&feats.data)?;
    let predicted = model.predict_all(&feats.data);
    let m = cohypo_core::eval::metrics(&predicted, feats.data.labels())?;
    log::info!("training accuracy {:.4}, F1 {:.2}", m.accuracy, m.f1_percent);
    ModelFile {
        spec,
        dim: feats.data.dim(),
        model,
    }
    .save(&out)?;
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    write_provenance(ctx, "train", args, &inputs, &[&out])
}

pub fn evaluate(ctx: &Context, args: &EvaluateArgs) -> CliResult<()> {
    let out = ctx.path(&args.out);
    let (pairs, pairs_path) = load_dataset(ctx, &args.input)?;
    let needs_counts = args.model.model == ModelKind::LinP;
    // Resolve every input before any training starts.
    let emb_path = args.emb.as_ref().map(|p| ctx.path(p));
    let counts_path = args.counts.as_ref().map(|p| ctx.path(p));
    if needs_counts && counts_path.is_none() {
        return Err(CliError::usage("--counts is required for linp"));
    }
    if !needs_counts && emb_path.is_none() {
        return Err(CliError::usage("--emb is required for this model"));
    }
    let emb = match (&emb_path, needs_counts) {
        (Some(p), false) => Some(EmbeddingMatrix::load(p)?),
        _ => None,
    };
    let rankings = match (&counts_path, needs_counts) {
        (Some(p), true) => Some(rankings_from(p, args.k_features)?),
        _ => None,
    };
    let pairs_hash = sha256_file(&pairs_path)?;
    let emb_hash = match (&emb_path, &emb) {
        (Some(p), Some(_)) => Some(sha256_file(p)?),
        _ => None,
    };
    let cfg = ExperimentConfig {
        experiment: args.experiment,
        model: args.model.spec(args.seed),
        op: args.model.op,
        folds: args.folds,
        seed: args.seed,
        l2_normalize: args.model.l2_normalize,
    };
    let report = run_experiment(
        &cfg,
        &ExperimentInputs {
            pairs: Some(&pairs),
            embedding: emb.as_ref(),
            rankings: rankings.as_ref(),
            pairs_hash: Some(&pairs_hash),
            embedding_hash: emb_hash.as_deref(),
        },
    )?;
    for line in report.summary().lines() {
        log::info!("{line}");
    }
    report.save(&out)?;
    let mut inputs = vec![pairs_path];
    inputs.extend(if needs_counts { counts_path } else { emb_path });
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    write_provenance(ctx, "evaluate", args, &inputs, &[&out])
}

pub fn overlap(ctx: &Context, args: &OverlapArgs) -> CliResult<()> {
    let (pa, pb) = (ctx.path(&args.a), ctx.path(&args.b));
    let a = load_pairs(&pa, &args.a_format.parse()?)?;
    let b = load_pairs(&pb, &args.b_format.parse()?)?;
    let o = dataset_overlap(&a, &b);
    println!(
        "{}\t{}\tshared={}\tpct_of_a={:.1}\tpct_of_b={:.1}",
        pa.display(),
        pb.display(),
        o.shared,
        o.pct_of_a,
        o.pct_of_b
    );
    if let Some(out) = &args.out {
        let out = ctx.path(out);
        let text = serde_json::to_string_pretty(&o).expect("overlap serializes");
        write_with(&out, |w| writeln!(w, "{text}"))?;
        write_provenance(ctx, "overlap", args, &[&pa, &pb], &[&out])?;
    }
    Ok(())
}

pub fn analyze_errors(ctx: &Context, args: &AnalyzeArgs) -> CliResult<()> {
    let report_path = ctx.path(&args.report);
    let report = EvalReport::load(&report_path)?;
    let mut inputs = vec![report_path];
    let counts = match &args.counts {
        Some(p) => {
            let p = ctx.path(p);
            let c = CountTable::load_or_ingest(&p)?;
            inputs.push(p);
            Some(c)
        }
        None => None,
    };
    let graph = match &args.graph {
        Some(p) => {
            let p = ctx.path(p);
            let g = DtGraph::load(&p)?;
            inputs.push(p);
            Some(g)
        }
        None => None,
    };
    let opts = AnalysisOptions {
        ratio_threshold: args.ratio_threshold,
        top_neighbors: args.top_neighbors,
    };
    let rows = error_analysis(&report, counts.as_ref(), graph.as_ref(), &opts);
    log::info!(
        "{} misclassified pairs, {} flagged for frequency imbalance",
        rows.len(),
        rows.iter().filter(|r| r.flagged).count()
    );
    match &args.out {
        Some(out) => {
            let out = ctx.path(out);
            write_with(&out, |w| write_analysis_tsv(&rows, w))?;
            let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
            write_provenance(ctx, "analyze-errors", args, &inputs, &[&out])
        }
        None => {
            let stdout = std::io::stdout();
            write_analysis_tsv(&rows, stdout.lock()).map_err(cohypo_core::Error::from)?;
            Ok(())
        }
    }
}

pub fn synth(ctx: &Context, args: &SynthArgs) -> CliResult<()> {
    let dir = ctx.path(&args.out_dir);
    let cfg = SynthConfig {
        classes: args.classes,
        superclasses: args.superclasses,
        members_per_class: args.members_per_class,
        fillers: args.fillers,
        class_share: args.class_share,
        member_tokens: args.member_tokens,
        hub_tokens: args.hub_tokens,
        pairs_per_relation: args.pairs_per_relation,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let corpus = generate(&cfg)?;
    let (counts, pairs) = corpus.write_dir(&dir)?;
    log::info!(
        "wrote {} count records and {} pairs to {}",
        corpus.counts.len(),
        corpus.pairs.len(),
        dir.display()
    );
    write_provenance(ctx, "synth", args, &[], &[&counts, &pairs])
}
