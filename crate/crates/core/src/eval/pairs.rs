//! Labelled word-pair datasets and their input formats.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Cohyp,
    Hyper,
    Mero,
    Random,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::Cohyp, Relation::Hyper, Relation::Mero, Relation::Random];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Cohyp => "cohyp",
            Relation::Hyper => "hyper",
            Relation::Mero => "mero",
            Relation::Random => "random",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;

    /// Accepts the canonical names plus the spellings used by common
    /// benchmark files (`coord`, `hypernym`, `meronym`, `random-n`, and
    /// `1`/`0`, `true`/`false` for binary files whose negative class has
    /// no finer tag).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let tag = s.trim().to_ascii_lowercase();
        let rel = match tag.as_str() {
            "cohyp" | "coord" | "cohyponym" | "co-hyponym" | "cohyponymy" | "co-hyponymy" | "1" | "true" => Relation::Cohyp,
            "hyper" | "hypernym" | "hypernymy" | "hyp" | "isa" => Relation::Hyper,
            "mero" | "meronym" | "meronymy" | "part_of" | "partof" | "mer" => Relation::Mero,
            "random" | "rand" | "random-n" | "random-v" | "random-j" | "0" | "false" => Relation::Random,
            _ => {
                return Err(format!(
                    "unknown relation tag '{s}' (allowed: cohyp, hyper, mero, random and their aliases coord, hypernym, meronym, random-n, 1/0)"
                ))
            }
        };
        Ok(rel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub word1: String,
    pub word2: String,
    pub relation: Relation,
    pub source: String,
}

impl PairRecord {
    pub fn new(word1: &str, word2: &str, relation: Relation, source: &str) -> Self {
        PairRecord {
            word1: word1.to_owned(),
            word2: word2.to_owned(),
            relation,
            source: source.to_owned(),
        }
    }

    /// 1 for co-hyponyms, 0 for every other relation.
    pub fn label(&self) -> u8 {
        u8::from(self.relation == Relation::Cohyp)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPairDataset {
    name: String,
    records: Vec<PairRecord>,
}

impl LabeledPairDataset {
    /// Fails on a repeated (word1, word2, relation) triple.
    pub fn new(name: &str, records: Vec<PairRecord>) -> Result<Self> {
        let mut seen: HashMap<(&str, &str, Relation), usize> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            if let Some(first) = seen.insert((&r.word1, &r.word2, r.relation), i) {
                return Err(Error::contract(format!(
                    "duplicate pair ({}, {}, {}) at records {} and {}",
                    r.word1,
                    r.word2,
                    r.relation,
                    first + 1,
                    i + 1
                )));
            }
        }
        Ok(LabeledPairDataset {
            name: name.to_owned(),
            records,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn records(&self) -> &[PairRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(PairRecord::label).collect()
    }

    /// Keeps only records whose relation is listed.
    pub fn with_relations(&self, relations: &[Relation]) -> LabeledPairDataset {
        LabeledPairDataset {
            name: self.name.clone(),
            records: self
                .records
                .iter()
                .filter(|r| relations.contains(&r.relation))
                .cloned()
                .collect(),
        }
    }

    /// Canonical `word1 \t word2 \t relation` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            writeln!(out, "{}\t{}\t{}", r.word1, r.word2, r.relation)?;
        }
        out.flush()
    }
}

/// Column layout of a pair file.
///
/// Presets:
/// - `tsv`: canonical `word1 \t word2 \t relation`.
/// - `bless`: BLESS-style `concept \t class \t relation \t relatum` with
///   `-n`/`-v`/`-j` POS suffixes stripped; `attri` and `event` rows ignored.
/// - `root9`: `word1 \t word2 \t relation` with POS suffixes stripped.
/// - `weeds`: `word1 \t word2 \t 1|0` with POS suffixes stripped.
///
/// Custom layouts use a comma-separated spec, e.g.
/// `w1=0,w2=3,rel=2,strip-pos,header,ignore=attri|event,sep=space`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFormat {
    pub word1_col: usize,
    pub word2_col: usize,
    pub relation_col: usize,
    /// Split on runs of whitespace instead of tabs.
    pub whitespace: bool,
    pub strip_pos: bool,
    pub header: bool,
    pub ignore_tags: Vec<String>,
}

impl Default for PairFormat {
    fn default() -> Self {
        PairFormat {
            word1_col: 0,
            word2_col: 1,
            relation_col: 2,
            whitespace: false,
            strip_pos: false,
            header: false,
            ignore_tags: Vec::new(),
        }
    }
}

impl FromStr for PairFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let base = PairFormat::default();
        match s {
            "tsv" => return Ok(base),
            "root9" | "weeds" | "jana" => return Ok(PairFormat { strip_pos: true, ..base }),
            "bless" => {
                return Ok(PairFormat {
                    word2_col: 3,
                    relation_col: 2,
                    strip_pos: true,
                    ignore_tags: vec!["attri".into(), "event".into()],
                    ..base
                })
            }
            _ => {}
        }
        let mut fmt = base;
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (key, value) = item.split_once('=').unwrap_or((item, ""));
            let col = || value.parse::<usize>().map_err(|_| Error::Format(format!("bad column in '{item}'")));
            match key {
                "w1" => fmt.word1_col = col()?,
                "w2" => fmt.word2_col = col()?,
                "rel" => fmt.relation_col = col()?,
                "strip-pos" => fmt.strip_pos = true,
                "header" => fmt.header = true,
                "sep" if value == "space" || value == "whitespace" => fmt.whitespace = true,
                "sep" if value == "tab" => fmt.whitespace = false,
                "ignore" => fmt.ignore_tags = value.split('|').map(str::to_ascii_lowercase).collect(),
                _ => return Err(Error::Format(format!("unknown pair-format item '{item}'"))),
            }
        }
        Ok(fmt)
    }
}

fn strip_pos_suffix(word: &str) -> &str {
    for suffix in ["-n", "-v", "-j", "-a", "-r"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            if !stem.is_empty() {
                return stem;
            }
        }
    }
    word
}

pub fn read_pairs<R: BufRead>(reader: R, source_name: &str, format: &PairFormat) -> Result<LabeledPairDataset> {
    let mut records = Vec::new();
    let mut lines_of: HashMap<(String, String, Relation), usize> = HashMap::new();
    let needed = format.word1_col.max(format.word2_col).max(format.relation_col) + 1;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || (format.header && idx == 0) {
            continue;
        }
        let fields: Vec<&str> = if format.whitespace {
            line.split_whitespace().collect()
        } else {
            line.split('\t').collect()
        };
        if fields.len() < needed {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("expected at least {needed} columns, found {}", fields.len()),
            ));
        }
        let tag = fields[format.relation_col].trim();
        if format.ignore_tags.iter().any(|t| t.eq_ignore_ascii_case(tag)) {
            continue;
        }
        let relation: Relation = tag.parse().map_err(|e| Error::parse(source_name, line_no, e))?;
        let word = |c: usize| {
            let w = fields[c].trim();
            if format.strip_pos {
                strip_pos_suffix(w)
            } else {
                w
            }
        };
        let (w1, w2) = (word(format.word1_col), word(format.word2_col));
        if w1.is_empty() || w2.is_empty() {
            return Err(Error::parse(source_name, line_no, "empty word"));
        }
        let key = (w1.to_owned(), w2.to_owned(), relation);
        if let Some(first) = lines_of.insert(key, line_no) {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("duplicate pair ({w1}, {w2}, {relation}); first seen on line {first}"),
            ));
        }
        records.push(PairRecord::new(w1, w2, relation, source_name));
    }
    LabeledPairDataset::new(source_name, records)
}

pub fn load_pairs(path: &Path, format: &PairFormat) -> Result<LabeledPairDataset> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let reader = util::open_maybe_gzip(path)?;
    read_pairs(reader, &name, format).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::parse(path.display().to_string(), line, message),
        other => other,
    })
}
