//! `cohypo run`: the ingest, build-graph, embed and evaluate stages driven
//! by one config file, with content-hash caching of every stage output.
//!
//! ```text
//! [global]
//! seed = 7
//!
//! [ingest]
//! counts = counts.tsv
//! out = work/counts.bin
//!
//! [build-graph]
//! out = work/graph.dtg
//!
//! [embed]
//! out = work/emb.bin
//! epochs = 3
//!
//! [evaluate.random]
//! experiment = exp3-random
//! pairs = pairs.tsv
//! out = work/random.json
//! ```
//!
//! Keys are the long flags of the matching subcommand. Inputs produced by
//! an earlier stage are wired automatically and may not be set. Relative
//! paths are resolved against the config file's directory, or against
//! `data_dir` from `[global]`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, CommandFactory, Parser};
use cohypo_core::util::{self, sha256_file, sha256_hex};
use serde::{Deserialize, Serialize};

use crate::args::{Cli, RunArgs};
use crate::commands::Context;
use crate::error::{CliError, CliResult};

const STAGES: [&str; 4] = ["ingest", "build-graph", "embed", "evaluate"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    /// `evaluate.NAME` sections keep their full name.
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    fn stage(&self) -> &str {
        self.name.split('.').next().unwrap_or("")
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

fn config_error(source: &str, line: usize, message: impl std::fmt::Display) -> CliError {
    CliError::from(cohypo_core::Error::parse(source, line, message.to_string()))
}

/// Parses `[section]` headers and `key = value` lines. `#` and `;` start
/// comment lines; values may be wrapped in double quotes.
pub fn parse_config(text: &str, source: &str) -> CliResult<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config_error(source, line, "unterminated section header"))?
                .trim();
            let known = name == "global"
                || STAGES.contains(&name)
                || name.strip_prefix("evaluate.").is_some_and(|n| !n.is_empty());
            if !known {
                return Err(config_error(
                    source,
                    line,
                    format!("unknown section [{name}] (expected global, ingest, build-graph, embed, evaluate or evaluate.NAME)"),
                ));
            }
            if let Some(prev) = sections.iter().find(|s| s.name == name) {
                return Err(config_error(
                    source,
                    line,
                    format!("section [{name}] repeated (first on line {})", prev.line),
                ));
            }
            sections.push(Section {
                name: name.to_owned(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| config_error(source, line, format!("expected `key = value`, found '{trimmed}'")))?;
        let key = key.trim().replace('_', "-");
        let mut value = value.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| config_error(source, line, format!("key '{key}' appears before any section")))?;
        if let Some(prev) = section.get(&key) {
            return Err(config_error(
                source,
                line,
                format!("key '{key}' repeated (first on line {})", prev.line),
            ));
        }
        section.entries.push(Entry {
            key,
            value: value.to_owned(),
            line,
        });
    }
    Ok(sections)
}

/// Keys a stage section may set, with whether each is a boolean switch.
fn stage_keys(stage: &str) -> BTreeMap<String, bool> {
    let cmd = Cli::command();
    let sub = cmd.find_subcommand(stage).expect("stage is a subcommand");
    sub.get_arguments()
        .filter(|a| !a.is_global_set())
        .filter_map(|a| {
            let flag = matches!(a.get_action(), ArgAction::SetTrue);
            a.get_long().map(|l| (l.to_owned(), flag))
        })
        .filter(|(l, _)| l != "help" && l != "threads" && l != "log-level" && l != "data-dir")
        .collect()
}

/// Keys filled from earlier stages.
fn wired_keys(stage: &str) -> &'static [&'static str] {
    match stage {
        "build-graph" => &["counts"],
        "embed" => &["graph"],
        "evaluate" => &["emb", "counts"],
        _ => &[],
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct Stamp {
    key: String,
    output_sha256: String,
}

fn stamp_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".stamp");
    PathBuf::from(name)
}

fn read_stamp(out: &Path) -> Option<Stamp> {
    let text = std::fs::read_to_string(stamp_path(out)).ok()?;
    serde_json::from_str(&text).ok()
}

/// What happened to each stage of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutcome {
    pub section: String,
    pub rebuilt: bool,
}

struct PlannedStage {
    section: String,
    argv: Vec<String>,
    inputs: Vec<PathBuf>,
    out: PathBuf,
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_relative() {
        base.join(p)
    } else {
        p.to_path_buf()
    }
}

fn plan(sections: &[Section], base: &Path, source: &str) -> CliResult<Vec<PlannedStage>> {
    let global = sections.iter().find(|s| s.name == "global");
    let mut seed = None;
    let mut base = base.to_path_buf();
    if let Some(g) = global {
        for e in &g.entries {
            match e.key.as_str() {
                "seed" => seed = Some(e.value.clone()),
                "data-dir" => base = resolve(&base, &e.value),
                _ => {
                    return Err(config_error(
                        source,
                        e.line,
                        format!("unknown key '{}' in [global] (expected seed or data_dir)", e.key),
                    ))
                }
            }
        }
    }

    let mut outputs: BTreeMap<&str, PathBuf> = BTreeMap::new();
    let mut planned = Vec::new();
    for stage in STAGES {
        let of_stage: Vec<&Section> = sections.iter().filter(|s| s.stage() == stage).collect();
        if of_stage.is_empty() {
            continue;
        }
        let needed = match stage {
            "build-graph" => Some("ingest"),
            "embed" => Some("build-graph"),
            "evaluate" => Some("embed"),
            _ => None,
        };
        if let Some(prev) = needed {
            if !outputs.contains_key(prev) {
                return Err(config_error(
                    source,
                    of_stage[0].line,
                    format!("[{}] needs an earlier [{prev}] section", of_stage[0].name),
                ));
            }
        }
        let keys = stage_keys(stage);
        for section in of_stage {
            let mut argv = vec!["cohypo".to_owned(), stage.to_owned()];
            let mut inputs = Vec::new();
            let mut out = None;
            for e in &section.entries {
                let Some(&flag) = keys.get(&e.key) else {
                    return Err(config_error(
                        source,
                        e.line,
                        format!("unknown key '{}' in [{}]", e.key, section.name),
                    ));
                };
                if wired_keys(stage).contains(&e.key.as_str()) {
                    return Err(config_error(
                        source,
                        e.line,
                        format!("key '{}' in [{}] is taken from the previous stage", e.key, section.name),
                    ));
                }
                let is_path = matches!(e.key.as_str(), "counts" | "pairs" | "out" | "tsv");
                let value = if is_path {
                    resolve(&base, &e.value).display().to_string()
                } else {
                    e.value.clone()
                };
                if is_path && e.key != "out" && e.key != "tsv" {
                    inputs.push(PathBuf::from(&value));
                }
                if e.key == "out" {
                    out = Some(PathBuf::from(&value));
                }
                if flag {
                    match e.value.as_str() {
                        "true" => argv.push(format!("--{}", e.key)),
                        "false" => {}
                        other => {
                            return Err(config_error(
                                source,
                                e.line,
                                format!("key '{}' takes true or false, not '{other}'", e.key),
                            ))
                        }
                    }
                } else {
                    argv.push(format!("--{}", e.key));
                    argv.push(value);
                }
            }
            if section.get("seed").is_none() && keys.contains_key("seed") {
                if let Some(s) = &seed {
                    argv.push("--seed".into());
                    argv.push(s.clone());
                }
            }
            for &w in wired_keys(stage) {
                let from = match (stage, w) {
                    ("build-graph", _) | ("evaluate", "counts") => "ingest",
                    ("embed", _) => "build-graph",
                    _ => "embed",
                };
                let path = outputs[from].clone();
                argv.push(format!("--{w}"));
                argv.push(path.display().to_string());
                inputs.push(path);
            }
            let out = out.ok_or_else(|| config_error(source, section.line, format!("[{}] needs an `out` key", section.name)))?;
            planned.push(PlannedStage {
                section: section.name.clone(),
                argv,
                inputs,
                out: out.clone(),
            });
            outputs.entry(stage).or_insert(out);
        }
    }
    if planned.is_empty() {
        return Err(config_error(source, 1, "config defines no stages"));
    }
    Ok(planned)
}

pub fn run(ctx: &Context, args: &RunArgs) -> CliResult<Vec<StageOutcome>> {
    let config = ctx.path(&args.config);
    let text = std::fs::read_to_string(&config).map_err(|e| cohypo_core::Error::io(&config, e))?;
    let source = config.display().to_string();
    let sections = parse_config(&text, &source)?;
    let base = config
        .parent()
        .map(Path::to_path_buf)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."));
    let stages = plan(&sections, &base, &source)?;
    // Paths are already absolute or config-relative.
    let stage_ctx = Context {
        data_dir: None,
        threads: ctx.threads,
    };

    let mut outcomes = Vec::new();
    for stage in stages {
        let mut input_hashes = Vec::new();
        for p in &stage.inputs {
            input_hashes.push((p.display().to_string(), sha256_file(p)?));
        }
        let key_material = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "argv": stage.argv,
            "threads": ctx.threads,
            "inputs": input_hashes,
        });
        let key = sha256_hex(key_material.to_string().as_bytes());
        let current = !args.force
            && stage.out.exists()
            && read_stamp(&stage.out).is_some_and(|s| {
                s.key == key && sha256_file(&stage.out).is_ok_and(|h| h == s.output_sha256)
            });
        if current {
            log::info!("[{}] up to date, skipped", stage.section);
            outcomes.push(StageOutcome {
                section: stage.section,
                rebuilt: false,
            });
            continue;
        }
        log::info!("[{}] running: {}", stage.section, stage.argv[1..].join(" "));
        let cli = Cli::try_parse_from(&stage.argv)
            .map_err(|e| CliError::usage(format!("[{}]: {}", stage.section, crate::first_line(&e.to_string()))))?;
        crate::dispatch(&stage_ctx, &cli.command)?;
        let stamp = Stamp {
            key,
            output_sha256: sha256_file(&stage.out)?,
        };
        let path = stamp_path(&stage.out);
        let mut w = util::create_file(&path)?;
        writeln!(w, "{}", serde_json::to_string(&stamp).expect("stamp serializes"))
            .and_then(|_| w.flush())
            .map_err(|e| cohypo_core::Error::io(&path, e))?;
        outcomes.push(StageOutcome {
            section: stage.section,
            rebuilt: true,
        });
    }
    Ok(outcomes)
}
