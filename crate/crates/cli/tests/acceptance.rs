//! Acceptance suite. Prints one PASS, FAIL or SKIP line per criterion and
//! exits nonzero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cohypo_core::classify::{
    fit_tree, knn_predict, train_linear_svm, train_random_forest, Dataset, ForestParams, Node, SvmParams,
};
use cohypo_core::dt::{build_dt_graph, build_feature_rankings, CountTableBuilder, DtGraph, Vocabulary};
use cohypo_core::embed::{embed_graph, pair_loss_and_grad, precompute_transitions, SgnsConfig, WalkConfig};
use cohypo_core::eval::{metrics, stratified_kfold};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = Box<dyn FnOnce() -> Verdict>;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: u64, outcome: Outcome) -> Verdict {
    let t = format!("{:.2}s", elapsed.as_secs_f64());
    match outcome {
        Ok(d) if elapsed.as_secs_f64() < limit_s as f64 => Verdict::Pass(format!("{d} ({t})")),
        Ok(d) => Verdict::Fail(format!("{d} but took {t}, limit {limit_s}s")),
        Err(d) => Verdict::Fail(format!("{d} ({t})")),
    }
}

fn timed(limit_s: u64, f: impl FnOnce() -> Outcome) -> Verdict {
    let start = Instant::now();
    let outcome = f();
    within(start.elapsed(), limit_s, outcome)
}

// 1. graph construction against a brute-force rebuild

fn brute_force_edges(rows: &BTreeMap<String, BTreeMap<String, u64>>, k: usize, n: usize) -> BTreeMap<(String, String), u32> {
    let total: u64 = rows.values().flat_map(|r| r.values()).sum();
    let mut feature_totals: BTreeMap<&str, u64> = BTreeMap::new();
    for r in rows.values() {
        for (f, c) in r {
            *feature_totals.entry(f).or_default() += c;
        }
    }
    // feature ids follow sorted order, which BTreeMap iteration gives too
    let fid: BTreeMap<&str, usize> = feature_totals.keys().enumerate().map(|(i, f)| (*f, i)).collect();
    let top: Vec<(&String, BTreeSet<&str>)> = rows
        .iter()
        .map(|(w, r)| {
            let c_w: u64 = r.values().sum();
            let mut scored: Vec<(f64, usize, &str)> = r
                .iter()
                .map(|(f, &c)| {
                    let ratio = (c as f64 * total as f64) / (c_w as f64 * feature_totals[f.as_str()] as f64);
                    (c as f64 * ratio.log2(), fid[f.as_str()], f.as_str())
                })
                .collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            (w, scored.into_iter().take(k).map(|s| s.2).collect())
        })
        .collect();
    let mut edges = BTreeMap::new();
    for (i, (u, fu)) in top.iter().enumerate() {
        let mut cand: Vec<(u32, usize)> = top
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, (_, fv))| (fu.intersection(fv).count() as u32, j))
            .filter(|c| c.0 > 0)
            .collect();
        cand.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(w, j) in cand.iter().take(n) {
            let v = top[j].0;
            let key = if *u < v { ((*u).clone(), v.clone()) } else { (v.clone(), (*u).clone()) };
            edges.insert(key, w);
        }
    }
    edges
}

fn graph_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..20 {
        let n_words = rng.gen_range(5..=50);
        let n_feats = rng.gen_range(5..=200);
        let density = rng.gen_range(0.05..0.4);
        let mut rows: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        let mut b = CountTableBuilder::new();
        for w in 0..n_words {
            let word = format!("w{w:02}");
            for f in 0..n_feats {
                if rng.gen_bool(density) {
                    let c = rng.gen_range(1..30);
                    let feat = format!("f{f:03}");
                    b.add(&word, &feat, c);
                    rows.entry(word.clone()).or_default().insert(feat, c);
                }
            }
        }
        let table = b.build();
        let (k, n) = (rng.gen_range(1..=20), rng.gen_range(1..=10));
        let graph = build_dt_graph(&build_feature_rankings(&table, k).map_err(|e| e.to_string())?, n)
            .map_err(|e| e.to_string())?;
        let tok = |id: u32| graph.words().token(id).to_owned();
        let got: BTreeMap<(String, String), u32> = graph.edges().map(|(u, v, w)| ((tok(u), tok(v)), w)).collect();
        let want = brute_force_edges(&rows, k, n);
        if got != want {
            return Err(format!("table {trial} (k={k}, n={n}): {} edges vs {} from the oracle", got.len(), want.len()));
        }
    }
    Ok("20 random tables match the brute-force graph".into())
}

// 2. walk bias

fn walk_fixture() -> DtGraph {
    // node 0 = v, 1 = t, 2 = x1 (adjacent to t), 3 = x2 (not adjacent to t)
    let words = Vocabulary::from_sorted((0..10).map(|i| format!("n{i}")).collect()).unwrap();
    let edges = [
        (0, 1, 1),
        (0, 2, 1),
        (0, 3, 1),
        (1, 2, 1),
        (1, 4, 3),
        (2, 5, 2),
        (3, 6, 5),
        (4, 5, 1),
        (4, 7, 2),
        (5, 8, 4),
        (6, 9, 1),
        (7, 8, 3),
        (8, 9, 2),
        (3, 9, 6),
        (6, 7, 1),
    ];
    DtGraph::from_edges(words, &edges).unwrap()
}

fn walk_bias() -> Outcome {
    let g = walk_fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 100_000;
    let freq = |table: &cohypo_core::embed::AliasTable, rng: &mut ChaCha8Rng| {
        let mut c = vec![0f64; table.len()];
        for _ in 0..draws {
            c[table.sample(rng)] += 1.0;
        }
        c.into_iter().map(|x| x / draws as f64).collect::<Vec<f64>>()
    };

    let unbiased = precompute_transitions(&g, 1.0, 1.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for v in 0..10u32 {
        let w = g.weights(v);
        let total: u32 = w.iter().sum();
        let expected: Vec<f64> = w.iter().map(|&x| x as f64 / total as f64).collect();
        let l1 = |f: &[f64]| f.iter().zip(&expected).map(|(a, b)| (a - b).abs()).sum::<f64>();
        worst = worst.max(l1(&freq(unbiased.first_step(v).unwrap(), &mut rng)));
        // steps out of v, each arriving over a random incoming arc
        let arcs: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&t| g.range(t).find(|&a| g.arc_target(a) == v).unwrap())
            .collect();
        let mut c = vec![0f64; w.len()];
        for _ in 0..draws {
            let arc = arcs[rng.gen_range(0..arcs.len())];
            c[unbiased.second_step(arc).sample(&mut rng)] += 1.0;
        }
        c.iter_mut().for_each(|x| *x /= draws as f64);
        worst = worst.max(l1(&c));
    }
    if worst > 0.01 {
        return Err(format!("p=q=1 worst L1 {worst:.4}"));
    }

    let biased = precompute_transitions(&g, 2.0, 0.5).map_err(|e| e.to_string())?;
    let arc = g.range(1).find(|&a| g.arc_target(a) == 0).unwrap();
    let f = freq(biased.second_step(arc), &mut rng);
    let want = [1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0];
    let dev = f.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(
        dev <= 0.01,
        format!("p=q=1 worst L1 {worst:.4}; p=2,q=0.5 gives ({:.4}, {:.4}, {:.4}), max deviation {dev:.4}", f[0], f[1], f[2]),
    )
}

// 3. gradient check

fn sgns_loss(c: &[f64], p: &[f64], negs: &[Vec<f64>]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let log_sigmoid = |x: f64| -(1.0 + (-x).exp()).ln();
    -log_sigmoid(dot(c, p)) - negs.iter().map(|n| log_sigmoid(-dot(c, n))).sum::<f64>()
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut gen = || (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
        let c = gen();
        let p = gen();
        let negs: Vec<Vec<f64>> = (0..5).map(|_| gen()).collect();
        let refs: Vec<&[f64]> = negs.iter().map(Vec::as_slice).collect();
        let (_, gc, gp, gn) = pair_loss_and_grad(&c, &p, &refs);
        let mut compare = |analytic: f64, plus: f64, minus: f64| {
            let numeric = (plus - minus) / (2.0 * h);
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        };
        for i in 0..8 {
            let bump = |v: &[f64], d: f64| {
                let mut v = v.to_vec();
                v[i] += d;
                v
            };
            compare(gc[i], sgns_loss(&bump(&c, h), &p, &negs), sgns_loss(&bump(&c, -h), &p, &negs));
            compare(gp[i], sgns_loss(&c, &bump(&p, h), &negs), sgns_loss(&c, &bump(&p, -h), &negs));
            for j in 0..negs.len() {
                let mut plus = negs.clone();
                plus[j][i] += h;
                let mut minus = negs.clone();
                minus[j][i] -= h;
                compare(gn[j][i], sgns_loss(&c, &p, &plus), sgns_loss(&c, &p, &minus));
            }
        }
    }
    check(worst < 1e-4, format!("max relative error {worst:.2e} over 100 configurations"))
}

// 4. community separation

fn communities() -> Outcome {
    let words = Vocabulary::from_sorted((0..12).map(|i| format!("n{i:02}")).collect()).unwrap();
    let mut edges = Vec::new();
    for block in [0u32, 6] {
        for a in block..block + 6 {
            for b in a + 1..block + 6 {
                edges.push((a, b, 1));
            }
        }
    }
    edges.push((5, 6, 1));
    let g = DtGraph::from_edges(words, &edges).unwrap();
    let walk = WalkConfig { seed: 5, ..Default::default() };
    let sgns = SgnsConfig {
        seed: 5,
        threads: 1,
        ..Default::default()
    };
    let (emb, _) = embed_graph(&g, &walk, &sgns).map_err(|e| e.to_string())?;
    let cos = |a: usize, b: usize| {
        let (u, v) = (emb.row(a), emb.row(b));
        let dot: f32 = u.iter().zip(v).map(|(x, y)| x * y).sum();
        let norm = |x: &[f32]| x.iter().map(|y| y * y).sum::<f32>().sqrt();
        (dot / (norm(u) * norm(v))) as f64
    };
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    for a in 0..12 {
        for b in a + 1..12 {
            if (a < 6) == (b < 6) { &mut intra } else { &mut inter }.push(cos(a, b));
        }
    }
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let gap = mean(&intra) - mean(&inter);
    check(
        gap >= 0.2,
        format!("intra {:.3}, inter {:.3}, gap {gap:.3}", mean(&intra), mean(&inter)),
    )
}

// 5. classifiers

fn classifiers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut notes = Vec::new();

    // exhaustive Gini scan on 1-D fixtures
    for fixture in 0..20 {
        let n = rng.gen_range(4..30);
        let xs: Vec<f64> = (0..n).map(|_| (rng.gen_range(0..1000) as f64) / 100.0).collect();
        let ys: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        let gini = |ys: &[u8]| {
            if ys.is_empty() {
                return 0.0;
            }
            let p = ys.iter().filter(|&&y| y == 1).count() as f64 / ys.len() as f64;
            2.0 * p * (1.0 - p)
        };
        let mut best: Option<(f64, f64)> = None;
        for w in sorted.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (l, r): (Vec<u8>, Vec<u8>) = {
                let l = xs.iter().zip(&ys).filter(|p| *p.0 <= t).map(|p| *p.1).collect();
                let r = xs.iter().zip(&ys).filter(|p| *p.0 > t).map(|p| *p.1).collect();
                (l, r)
            };
            let imp = (l.len() as f64 * gini(&l) + r.len() as f64 * gini(&r)) / n as f64;
            if best.is_none_or(|b| imp < b.0 - 1e-12) {
                best = Some((imp, t));
            }
        }
        let data = Dataset::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>(), ys.clone()).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let tree = fit_tree(&data, &all, Some(1), 1, &mut ChaCha8Rng::seed_from_u64(0));
        let parent = gini(&ys);
        match (tree.root(), best) {
            (Node::Split { threshold, .. }, Some((imp, t))) if imp < parent - 1e-12 => {
                if (threshold - t).abs() > 1e-9 {
                    return Err(format!("1-D fixture {fixture}: threshold {threshold} vs scan {t}"));
                }
            }
            (Node::Leaf { .. }, None) => {}
            (Node::Leaf { .. }, Some((imp, _))) if imp >= parent - 1e-12 => {}
            (root, b) => return Err(format!("1-D fixture {fixture}: root {root:?} vs scan {b:?}")),
        }
    }
    notes.push("Gini scan on 20 fixtures".to_owned());

    // XOR, 10-fold
    let (mut rows, mut labels) = (Vec::new(), Vec::new());
    for _ in 0..400 {
        let (x, y) = (rng.gen_range(-1.0..1.0f64), rng.gen_range(-1.0..1.0f64));
        rows.push(vec![x, y]);
        labels.push(((x > 0.0) != (y > 0.0)) as u8);
    }
    let xor = Dataset::from_rows(&rows, labels.clone()).unwrap();
    let folds = stratified_kfold(&labels, 10, 1).map_err(|e| e.to_string())?;
    let mut correct = 0;
    for f in 0..10 {
        let train = xor.subset(&folds.train_indices(f));
        let forest = train_random_forest(&train, ForestParams { n_trees: 50, ..Default::default() })
            .map_err(|e| e.to_string())?;
        correct += folds.test_indices(f).iter().filter(|&&i| forest.predict(xor.row(i)) == xor.label(i)).count();
    }
    let acc = correct as f64 / xor.len() as f64;
    if acc <= 0.9 {
        return Err(format!("RF XOR 10-fold accuracy {acc:.3}"));
    }
    notes.push(format!("XOR accuracy {acc:.3}"));

    // margin-1 blobs for Pegasos
    let (mut rows, mut labels) = (Vec::new(), Vec::new());
    for i in 0..200 {
        let y = (i % 2) as u8;
        let centre = if y == 1 { 3.0 } else { -3.0 };
        rows.push(vec![centre + rng.gen_range(-1.0..1.0), rng.gen_range(-4.0..4.0)]);
        labels.push(y);
    }
    let blobs = Dataset::from_rows(&rows, labels).unwrap();
    let svm = train_linear_svm(&blobs, SvmParams { lambda: 1e-3, epochs: 100, seed: 1 }).map_err(|e| e.to_string())?;
    let svm_acc = (0..blobs.len()).filter(|&i| svm.predict(blobs.row(i)) == blobs.label(i)).count() as f64 / blobs.len() as f64;
    if svm_acc < 1.0 {
        return Err(format!("Pegasos training accuracy {svm_acc:.3}"));
    }
    notes.push("Pegasos 1.000".to_owned());

    // kNN against a brute-force scan
    for fixture in 0..50 {
        let rows: Vec<Vec<f64>> = (0..10).map(|_| vec![rng.gen_range(0..5) as f64, rng.gen_range(0..5) as f64]).collect();
        let labels: Vec<u8> = (0..10).map(|_| rng.gen_range(0..2)).collect();
        let data = Dataset::from_rows(&rows, labels.clone()).unwrap();
        let q = [rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0)];
        for k in 1..=10 {
            let mut by_dist: Vec<(f64, usize)> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| ((r[0] - q[0]).powi(2) + (r[1] - q[1]).powi(2), i))
                .collect();
            by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let ones = by_dist[..k].iter().filter(|p| labels[p.1] == 1).count();
            let want = (2 * ones > k) as u8;
            let got = knn_predict(&data, &q, k).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("kNN fixture {fixture}, k={k}: {got} vs brute force {want}"));
            }
        }
    }
    notes.push("kNN 50 fixtures".to_owned());
    Ok(notes.join("; "))
}

// pipeline helpers shared by 6 and 9

fn cohypo(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cohypo"))
        .current_dir(dir)
        .args(["--threads", "1", "--log-level", "warn"])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn report_value(path: &Path, key: &str) -> Result<f64, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    v["mean"][key].as_f64().ok_or_else(|| format!("no mean.{key} in {}", path.display()))
}

const PLANTED_CONFIG: &str = "\
[ingest]
counts = data/counts.tsv
out = work/counts.bin

[build-graph]
out = work/graph.dtg

[embed]
out = work/emb.txt

[evaluate.random]
experiment = exp3-random
pairs = data/pairs.tsv
out = work/random-rf.json

[evaluate.hyper]
experiment = exp3-hyper
pairs = data/pairs.tsv
out = work/hyper-rf.json

[evaluate.hyper-cosine]
experiment = exp3-hyper
model = cosinep
pairs = data/pairs.tsv
out = work/hyper-cosinep.json
";

fn planted() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = tmp.path();
    cohypo(d, &["synth", "--out-dir", "data"])?;
    let words = std::fs::read_to_string(d.join("data/counts.tsv"))
        .map_err(|e| e.to_string())?
        .lines()
        .map(|l| l.split('\t').next().unwrap_or("").to_owned())
        .collect::<BTreeSet<_>>()
        .len();
    std::fs::write(d.join("pipe.ini"), PLANTED_CONFIG).map_err(|e| e.to_string())?;
    cohypo(d, &["run", "--config", "pipe.ini"])?;
    let random = report_value(&d.join("work/random-rf.json"), "accuracy")?;
    let hyper = report_value(&d.join("work/hyper-rf.json"), "accuracy")?;
    let cosine = report_value(&d.join("work/hyper-cosinep.json"), "accuracy")?;
    check(
        words == 500 && random >= 0.90 && hyper >= 0.80 && hyper >= cosine,
        format!("{words} words; RF_CC cohyp/random {random:.4}, cohyp/hyper {hyper:.4}; cosineP cohyp/hyper {cosine:.4}"),
    )
}

// 7. benchmark overlap, when the files are supplied

fn benchmark_overlap() -> Verdict {
    let var = |name: &str| std::env::var_os(name).map(PathBuf::from).filter(|p| p.exists());
    let (Some(weeds), Some(root9), Some(jana)) = (var("COHYPO_WEEDS"), var("COHYPO_ROOT9"), var("COHYPO_JANA")) else {
        return Verdict::Skip("set COHYPO_WEEDS, COHYPO_ROOT9 and COHYPO_JANA to the benchmark files".into());
    };
    let fmt = |name: &str| std::env::var(name).unwrap_or_else(|_| "tsv".into());
    let pct = |b: &Path, b_format: String| -> Result<(f64, f64), String> {
        let line = cohypo(
            Path::new("."),
            &[
                "overlap",
                "--a",
                weeds.to_str().unwrap(),
                "--a-format",
                &fmt("COHYPO_WEEDS_FORMAT").replace("tsv", "weeds"),
                "--b",
                b.to_str().unwrap(),
                "--b-format",
                &b_format,
            ],
        )?;
        let field = |k: &str| {
            line.split('\t')
                .find_map(|f| f.trim().strip_prefix(k))
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| format!("no {k} in '{line}'"))
        };
        Ok((field("pct_of_a=")?, field("pct_of_b=")?))
    };
    let start = Instant::now();
    let outcome = (|| {
        let r = pct(&root9, fmt("COHYPO_ROOT9_FORMAT").replace("tsv", "root9"))?;
        let j = pct(&jana, fmt("COHYPO_JANA_FORMAT").replace("tsv", "jana"))?;
        let close = |got: (f64, f64), want: (f64, f64)| (got.0 - want.0).abs() <= 0.5 && (got.1 - want.1).abs() <= 0.5;
        check(
            close(r, (45.7, 27.8)) && close(j, (36.7, 44.9)),
            format!("Weeds/ROOT9 {:.1}/{:.1}, Weeds/Jana {:.1}/{:.1}", r.0, r.1, j.0, j.1),
        )
    })();
    within(start.elapsed(), 600, outcome)
}

// 8. metrics

fn metric_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..1000 {
        let n = rng.gen_range(1..200);
        let pred: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let gold: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let m = metrics(&pred, &gold).map_err(|e| e.to_string())?;
        let count = |p: u8, g: u8| pred.iter().zip(&gold).filter(|&(&a, &b)| a == p && b == g).count() as f64;
        let (tp, fp, tn, fn_) = (count(1, 1), count(1, 0), count(0, 0), count(0, 1));
        let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
        let precision = div(tp, tp + fp);
        let recall = div(tp, tp + fn_);
        let f1 = div(2.0 * precision * recall, precision + recall) * 100.0;
        let acc = (tp + tn) / n as f64;
        let ok = [(m.accuracy, acc), (m.precision, precision), (m.recall, recall), (m.f1_percent, f1)]
            .iter()
            .all(|(a, b)| (a - b).abs() < 1e-9)
            && (m.tp, m.fp, m.tn, m.fn_) == (tp as usize, fp as usize, tn as usize, fn_ as usize);
        if !ok {
            return Err(format!("vector {trial}: {m:?}"));
        }
    }
    // three of five predicted positives are right, three of four gold positives are found
    let pred = [1, 1, 1, 1, 1, 0, 0];
    let gold = [1, 1, 1, 0, 0, 1, 0];
    let m = metrics(&pred, &gold).map_err(|e| e.to_string())?;
    check(
        (m.precision - 0.6).abs() < 1e-9 && (m.recall - 0.75).abs() < 1e-9 && (m.f1_percent - 200.0 / 3.0).abs() < 1e-9,
        format!("1000 vectors match; worked example F1 {:.6}", m.f1_percent),
    )
}

// 9. determinism

const DETERMINISM_CONFIG: &str = "\
[global]
seed = 17

[ingest]
counts = data/counts.tsv
out = work/counts.bin

[build-graph]
out = work/graph.dtg

[embed]
out = work/emb.txt
dim = 32
epochs = 3
walks_per_node = 5

[evaluate]
experiment = exp3-hyper
pairs = data/pairs.tsv
out = work/report.json
";

fn determinism() -> Outcome {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let d = tmp.path();
        cohypo(
            d,
            &["synth", "--out-dir", "data", "--classes", "8", "--superclasses", "2", "--members-per-class", "10", "--fillers", "20", "--pairs-per-relation", "80"],
        )?;
        std::fs::write(d.join("pipe.ini"), DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
        cohypo(d, &["run", "--config", "pipe.ini"])?;
        runs.push(tmp);
    }
    let files = ["work/graph.dtg", "work/emb.txt", "work/emb.txt.bin", "work/report.json"];
    for f in files {
        let a = std::fs::read(runs[0].path().join(f)).map_err(|e| e.to_string())?;
        let b = std::fs::read(runs[1].path().join(f)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok(format!("{} artifacts byte-identical across two runs", files.len()))
}

fn main() {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 graph matches brute-force overlap oracle", Box::new(|| timed(10, graph_oracle))),
        ("2 walk transition probabilities", Box::new(|| timed(5, walk_bias))),
        ("3 skip-gram gradient check", Box::new(|| timed(60, gradient_check))),
        ("4 community separation", Box::new(|| timed(30, communities))),
        ("5 classifier oracles", Box::new(|| timed(120, classifiers))),
        ("6 planted benchmark end to end", Box::new(|| timed(300, planted))),
        ("7 benchmark dataset overlap", Box::new(benchmark_overlap)),
        ("8 metrics oracle", Box::new(|| timed(60, metric_oracle))),
        ("9 byte-identical reruns", Box::new(|| timed(300, determinism))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Verdict::Pass(d) => println!("PASS  {name}: {d}"),
            Verdict::Skip(d) => println!("SKIP  {name}: {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
