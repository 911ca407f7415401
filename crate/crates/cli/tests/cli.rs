mod common;

use common::{cohypo, ok, stderr, FAST_EMBED, SMALL_SYNTH};

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(cohypo(dir.path(), &["--help"]).status.success());
    assert!(cohypo(dir.path(), &["embed", "--help"]).status.success());
    assert!(cohypo(dir.path(), &["--version"]).status.success());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = cohypo(dir.path(), &["build-graph", "--counts", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[usage]:"), "{}", stderr(&out));
}

#[test]
fn missing_input_exits_three_and_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = cohypo(dir.path(), &["ingest", "--counts", "nowhere.tsv", "--out", "c.bin"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("error[io]") && err.contains("nowhere.tsv"), "{err}");
    assert_eq!(err.trim_end().lines().filter(|l| l.starts_with("error[")).count(), 1);
}

#[test]
fn malformed_counts_exit_four_with_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.tsv"), "cat\tfur\t3\ndog\tbark\n").unwrap();
    let out = cohypo(dir.path(), &["ingest", "--counts", "bad.tsv", "--out", "c.bin"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains(":2"), "{}", stderr(&out));
    assert!(!dir.path().join("c.bin").exists());

    // the same file passes when bad lines may be skipped
    ok(dir.path(), &["ingest", "--counts", "bad.tsv", "--out", "c.bin", "--skip-bad-lines"]);
}

#[test]
fn data_dir_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("d")).unwrap();
    std::fs::write(dir.path().join("d/c.tsv"), "cat\tfur\t3\ndog\tfur\t2\n").unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_cohypo"))
        .current_dir(dir.path())
        .env("COHYPO_DATA_DIR", dir.path().join("d"))
        .args(["ingest", "--counts", "c.tsv", "--out", "c.bin"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("d/c.bin").exists());
}

#[test]
fn full_chain_and_auxiliary_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, SMALL_SYNTH);
    ok(d, &["ingest", "--counts", "data/counts.tsv", "--out", "counts.bin"]);
    ok(d, &["build-graph", "--counts", "counts.bin", "--out", "graph.dtg", "--tsv", "graph.tsv"]);
    let mut embed = vec!["embed", "--graph", "graph.dtg", "--out", "emb.txt"];
    embed.extend(FAST_EMBED);
    ok(d, &embed);
    for f in ["counts.bin", "graph.dtg", "graph.tsv", "emb.txt", "emb.txt.bin", "emb.txt.config.json"] {
        assert!(d.join(f).exists(), "{f} missing");
    }

    ok(
        d,
        &[
            "evaluate", "--experiment", "exp3-random", "--pairs", "data/pairs.tsv", "--emb", "emb.txt", "--folds", "4",
            "--trees", "20", "--out", "report.json",
        ],
    );
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["folds"].as_array().unwrap().len(), 4);
    assert!(report["mean"]["accuracy"].as_f64().unwrap() > 0.5);
    let prov: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("report.json.config.json")).unwrap()).unwrap();
    assert_eq!(prov["threads"], 1);
    assert!(prov.to_string().contains("pairs.tsv"));

    // the count-based baseline needs no embedding
    ok(
        d,
        &[
            "evaluate", "--experiment", "exp3-hyper", "--pairs", "data/pairs.tsv", "--counts", "counts.bin", "--model",
            "linp", "--folds", "3", "--out", "lin.json",
        ],
    );

    ok(d, &["project", "--emb", "emb.txt.bin", "--out", "proj.tsv"]);
    let proj = std::fs::read_to_string(d.join("proj.tsv")).unwrap();
    assert_eq!(proj.lines().count(), 4 * 9 + 10);
    assert_eq!(proj.lines().next().unwrap().split('\t').count(), 3);

    ok(d, &["compose", "--emb", "emb.txt", "--pairs", "data/pairs.tsv", "--op", "diff", "--out", "feats.tsv"]);
    let feats = std::fs::read_to_string(d.join("feats.tsv")).unwrap();
    assert_eq!(feats.lines().next().unwrap().split('\t').count(), 4 + 16);

    ok(
        d,
        &["train", "--emb", "emb.txt", "--pairs", "data/pairs.tsv", "--model", "svm", "--out", "svm.model"],
    );
    assert!(d.join("svm.model").exists());

    let out = ok(d, &["overlap", "--a", "data/pairs.tsv", "--b", "data/pairs.tsv", "--out", "overlap.json"]);
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.contains("pct_of_a=100.0") && line.contains("pct_of_b=100.0"), "{line}");

    let out = ok(
        d,
        &["analyze-errors", "--report", "report.json", "--counts", "counts.bin", "--graph", "graph.dtg"],
    );
    let tsv = String::from_utf8(out.stdout).unwrap();
    assert!(tsv.lines().next().unwrap().starts_with("word1\tword2"), "{tsv}");
}

#[test]
fn contract_violation_exits_five() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, SMALL_SYNTH);
    // more neighbours than the table can give is fine; zero is not
    let out = cohypo(d, &["build-graph", "--counts", "data/counts.tsv", "--out", "g.dtg", "--n-neighbors", "0"]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}
