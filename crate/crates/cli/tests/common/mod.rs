#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn cohypo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohypo"))
        .current_dir(dir)
        .args(["--threads", "1", "--log-level", "info"])
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = cohypo(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A corpus small enough for debug-build tests.
pub const SMALL_SYNTH: &[&str] = &[
    "synth",
    "--out-dir",
    "data",
    "--classes",
    "4",
    "--superclasses",
    "2",
    "--members-per-class",
    "8",
    "--fillers",
    "10",
    "--member-tokens",
    "400",
    "--hub-tokens",
    "1200",
    "--pairs-per-relation",
    "24",
];

pub const FAST_EMBED: &[&str] = &[
    "--dim",
    "16",
    "--epochs",
    "2",
    "--walks-per-node",
    "4",
    "--walk-length",
    "20",
];
