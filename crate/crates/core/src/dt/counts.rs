//! Aggregated (word, context-feature) counts.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util;

pub type WordId = u32;
pub type FeatureId = u32;

const COUNTS_MAGIC: &[u8; 4] = b"CNT1";

/// Interned token table. Ids are the ranks of the tokens in byte-wise
/// lexicographic order, so the id assignment does not depend on the order
/// in which records were read.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
}

impl Vocabulary {
    /// Builds a vocabulary from tokens that are already sorted and unique.
    pub fn from_sorted(tokens: Vec<String>) -> Result<Self> {
        if tokens.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::contract("vocabulary tokens must be sorted and unique"));
        }
        Ok(Vocabulary { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.tokens
            .binary_search_by(|t| t.as_str().cmp(token))
            .ok()
            .map(|i| i as u32)
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Sparse word × feature count matrix with its marginals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    words: Vocabulary,
    features: Vocabulary,
    /// (word, feature, count) sorted by (word, feature).
    pairs: Vec<(WordId, FeatureId, u64)>,
    /// `pairs[word_offsets[w]..word_offsets[w + 1]]` are the entries of word `w`.
    word_offsets: Vec<usize>,
    word_counts: Vec<u64>,
    feature_counts: Vec<u64>,
    total: u64,
}

impl CountTable {
    pub fn words(&self) -> &Vocabulary {
        &self.words
    }

    pub fn features(&self) -> &Vocabulary {
        &self.features
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn word_count(&self, w: WordId) -> u64 {
        self.word_counts[w as usize]
    }

    pub fn feature_count(&self, f: FeatureId) -> u64 {
        self.feature_counts[f as usize]
    }

    /// Corpus frequency of a word given as a string, if present.
    pub fn frequency(&self, word: &str) -> Option<u64> {
        self.words.id(word).map(|w| self.word_count(w))
    }

    pub fn pair_count(&self, w: WordId, f: FeatureId) -> u64 {
        let row = self.row(w);
        row.binary_search_by_key(&f, |&(_, f, _)| f)
            .map(|i| row[i].2)
            .unwrap_or(0)
    }

    /// All (word, feature, count) entries of one word, ordered by feature id.
    pub fn row(&self, w: WordId) -> &[(WordId, FeatureId, u64)] {
        &self.pairs[self.word_offsets[w as usize]..self.word_offsets[w as usize + 1]]
    }

    pub fn pairs(&self) -> &[(WordId, FeatureId, u64)] {
        &self.pairs
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        util::write_tagged_cbor(path, COUNTS_MAGIC, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let table: CountTable = util::read_tagged_cbor(path, COUNTS_MAGIC)?;
        table.check_consistency()?;
        Ok(table)
    }

    /// Loads a saved table, or ingests the file strictly if it is not one.
    pub fn load_or_ingest(path: &Path) -> Result<Self> {
        if util::has_magic(path, COUNTS_MAGIC)? {
            Self::load(path)
        } else {
            Ok(ingest_path(path, IngestOptions::default())?.0)
        }
    }

    fn check_consistency(&self) -> Result<()> {
        let ok = self.word_offsets.len() == self.words.len() + 1
            && self.word_counts.len() == self.words.len()
            && self.feature_counts.len() == self.features.len()
            && self.word_offsets.last().copied() == Some(self.pairs.len())
            && self.pairs.iter().map(|p| p.2).sum::<u64>() == self.total;
        if ok {
            Ok(())
        } else {
            Err(Error::Format("count table marginals are inconsistent".into()))
        }
    }
}

/// Accumulates raw records; duplicate (word, feature) records are summed.
#[derive(Debug, Default)]
pub struct CountTableBuilder {
    words: HashMap<String, u32>,
    features: HashMap<String, u32>,
    counts: HashMap<(u32, u32), u64>,
}

impl CountTableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, word: &str, feature: &str, count: u64) {
        let w = intern(&mut self.words, word);
        let f = intern(&mut self.features, feature);
        *self.counts.entry((w, f)).or_insert(0) += count;
    }

    pub fn build(self) -> CountTable {
        let (words, word_map) = renumber(self.words);
        let (features, feature_map) = renumber(self.features);

        let mut pairs: Vec<(WordId, FeatureId, u64)> = self
            .counts
            .into_iter()
            .map(|((w, f), c)| (word_map[w as usize], feature_map[f as usize], c))
            .collect();
        pairs.sort_unstable();

        let mut word_counts = vec![0u64; words.len()];
        let mut feature_counts = vec![0u64; features.len()];
        let mut word_offsets = vec![0usize; words.len() + 1];
        for &(w, f, c) in &pairs {
            word_counts[w as usize] += c;
            feature_counts[f as usize] += c;
            word_offsets[w as usize + 1] += 1;
        }
        for i in 0..words.len() {
            word_offsets[i + 1] += word_offsets[i];
        }
        let total = word_counts.iter().sum();

        CountTable {
            words,
            features,
            pairs,
            word_offsets,
            word_counts,
            feature_counts,
            total,
        }
    }
}

fn intern(map: &mut HashMap<String, u32>, token: &str) -> u32 {
    if let Some(&id) = map.get(token) {
        return id;
    }
    let id = map.len() as u32;
    map.insert(token.to_owned(), id);
    id
}

/// Returns the sorted vocabulary and a provisional-id → final-id map.
fn renumber(map: HashMap<String, u32>) -> (Vocabulary, Vec<u32>) {
    let mut entries: Vec<(String, u32)> = map.into_iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut remap = vec![0u32; entries.len()];
    for (rank, (_, provisional)) in entries.iter().enumerate() {
        remap[*provisional as usize] = rank as u32;
    }
    let tokens = entries.into_iter().map(|(t, _)| t).collect();
    (Vocabulary { tokens }, remap)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Log and skip malformed lines instead of aborting.
    pub skip_bad_lines: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub lines: usize,
    pub records: usize,
    /// (line number, reason) of every skipped line.
    pub skipped: Vec<(usize, String)>,
}

/// Parses `word \t feature \t count` records.
pub fn ingest_reader<R: BufRead>(
    reader: R,
    source_name: &str,
    options: IngestOptions,
) -> Result<(CountTable, IngestReport)> {
    let mut builder = CountTableBuilder::new();
    let mut report = IngestReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        report.lines += 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        match parse_record(line) {
            Ok((word, feature, count)) => {
                builder.add(word, feature, count);
                report.records += 1;
            }
            Err(msg) if options.skip_bad_lines => {
                log::warn!("{source_name}:{line_no}: skipping malformed record: {msg}");
                report.skipped.push((line_no, msg));
            }
            Err(msg) => return Err(Error::parse(source_name, line_no, msg)),
        }
    }
    Ok((builder.build(), report))
}

pub fn ingest_path(path: &Path, options: IngestOptions) -> Result<(CountTable, IngestReport)> {
    let reader = util::open_maybe_gzip(path)?;
    ingest_reader(reader, &path.display().to_string(), options)
}

fn parse_record(line: &str) -> std::result::Result<(&str, &str, u64), String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(format!("expected 3 tab-separated fields, found {}", fields.len()));
    }
    let (word, feature, count) = (fields[0], fields[1], fields[2]);
    if word.is_empty() || feature.is_empty() {
        return Err("empty word or feature token".into());
    }
    let count: u64 = count
        .trim()
        .parse()
        .map_err(|_| format!("count '{count}' is not a non-negative integer"))?;
    if count == 0 {
        return Err("count must be positive".into());
    }
    Ok((word, feature, count))
}
