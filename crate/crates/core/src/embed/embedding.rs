//! Dense per-word vectors and their file formats.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sgns::SgnsConfig;
use super::walks::WalkConfig;
use crate::error::{Error, Result};
use crate::util;

const SIDECAR_MAGIC: &[u8; 4] = b"EMB1";

/// Input ("word") and context vectors, row-major, one row per vocabulary word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawEmbedding", into = "RawEmbedding")]
pub struct EmbeddingMatrix {
    words: Vec<String>,
    dim: usize,
    input: Vec<f32>,
    context: Vec<f32>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RawEmbedding {
    words: Vec<String>,
    dim: usize,
    input: Vec<f32>,
    context: Vec<f32>,
}

impl From<RawEmbedding> for EmbeddingMatrix {
    fn from(raw: RawEmbedding) -> Self {
        let index = raw.words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        EmbeddingMatrix {
            words: raw.words,
            dim: raw.dim,
            input: raw.input,
            context: raw.context,
            index,
        }
    }
}

impl From<EmbeddingMatrix> for RawEmbedding {
    fn from(m: EmbeddingMatrix) -> Self {
        RawEmbedding {
            words: m.words,
            dim: m.dim,
            input: m.input,
            context: m.context,
        }
    }
}

impl EmbeddingMatrix {
    /// `context` may be empty when only input vectors are known (e.g. a
    /// matrix read from the text format).
    pub fn new(words: Vec<String>, dim: usize, input: Vec<f32>, context: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("embedding dimension must be positive"));
        }
        if input.len() != words.len() * dim || !(context.is_empty() || context.len() == input.len()) {
            return Err(Error::contract("embedding matrix shape does not match vocabulary"));
        }
        if input.iter().chain(&context).any(|x| !x.is_finite()) {
            return Err(Error::Numerical("embedding contains non-finite values".into()));
        }
        let raw = RawEmbedding { words, dim, input, context };
        let m = EmbeddingMatrix::from(raw);
        if m.index.len() != m.words.len() {
            return Err(Error::contract("duplicate word in embedding vocabulary"));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn row_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.input[i * self.dim..(i + 1) * self.dim]
    }

    pub fn context_row(&self, i: usize) -> Option<&[f32]> {
        (!self.context.is_empty()).then(|| &self.context[i * self.dim..(i + 1) * self.dim])
    }

    /// Input vector of a word; this is the representation used downstream.
    pub fn vector(&self, word: &str) -> Option<&[f32]> {
        self.row_of(word).map(|i| self.row(i))
    }

    pub fn lookup(&self, word: &str) -> Result<&[f32]> {
        self.vector(word).ok_or_else(|| Error::UnknownWord(word.to_owned()))
    }

    /// Text format: `<vocab_size> <dim>` then `word v1 … vd` per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        if let Some(bad) = self.words.iter().find(|w| w.is_empty() || w.contains(char::is_whitespace)) {
            return Err(Error::Format(format!(
                "word '{bad}' cannot be written to the whitespace-separated text format"
            )));
        }
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for (i, word) in self.words.iter().enumerate() {
            write!(out, "{word}")?;
            for x in self.row(i) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R, source_name: &str) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(source_name, 1, "missing header line"))?;
        let header = header?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(source_name, 1, "header must be `<vocab_size> <dim>`")))
            .collect::<Result<_>>()?;
        let [count, dim] = dims[..] else {
            return Err(Error::parse(source_name, 1, "header must be `<vocab_size> <dim>`"));
        };
        let mut words = Vec::with_capacity(count);
        let mut input = Vec::with_capacity(count * dim);
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap_or_default().to_owned();
            let start = input.len();
            for f in fields {
                let x: f32 = f
                    .parse()
                    .map_err(|_| Error::parse(source_name, idx + 1, format!("bad vector component '{f}'")))?;
                input.push(x);
            }
            if input.len() - start != dim {
                return Err(Error::parse(
                    source_name,
                    idx + 1,
                    format!("expected {dim} components, found {}", input.len() - start),
                ));
            }
            words.push(word);
        }
        if words.len() != count {
            return Err(Error::Format(format!(
                "{source_name}: header announces {count} words, found {}",
                words.len()
            )));
        }
        EmbeddingMatrix::new(words, dim, input, Vec::new())
    }

    /// Loads either the binary sidecar (detected by magic) or the text format.
    pub fn load(path: &Path) -> Result<Self> {
        let mut head = [0u8; 4];
        {
            use std::io::Read;
            let mut f = util::open_file(path)?;
            let n = f.read(&mut head).map_err(|e| Error::io(path, e))?;
            if n < 4 {
                head = [0; 4];
            }
        }
        if &head == SIDECAR_MAGIC {
            Ok(EmbeddingArtifact::load(path)?.matrix)
        } else {
            Self::read_text(util::open_maybe_gzip(path)?, &path.display().to_string())
        }
    }
}

/// Binary sidecar: both matrices plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingArtifact {
    pub walk: WalkConfig,
    pub sgns: SgnsConfig,
    pub matrix: EmbeddingMatrix,
}

impl EmbeddingArtifact {
    pub fn save(&self, path: &Path) -> Result<()> {
        util::write_tagged_cbor(path, SIDECAR_MAGIC, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        util::read_tagged_cbor(path, SIDECAR_MAGIC)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EmbeddingMatrix {
        EmbeddingMatrix::new(
            vec!["owl".into(), "crow".into()],
            3,
            vec![0.5, -1.25, 3.0, 1e-7, 0.0, -2.5],
            vec![0.0; 6],
        )
        .unwrap()
    }

    #[test]
    fn text_roundtrip_preserves_input_vectors() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("2 3\nowl 0.5 -1.25 3\n"));
        let back = EmbeddingMatrix::read_text(buf.as_slice(), "mem").unwrap();
        assert_eq!(back.vector("crow"), m.vector("crow"));
        assert!(back.context_row(0).is_none());
    }

    #[test]
    fn text_reader_checks_shape() {
        assert!(EmbeddingMatrix::read_text("2 2\na 1 2\n".as_bytes(), "m").is_err());
        let err = EmbeddingMatrix::read_text("1 2\na 1\n".as_bytes(), "m").unwrap_err();
        assert!(err.to_string().contains("m:2"));
    }

    #[test]
    fn whitespace_words_rejected_for_text() {
        let m = EmbeddingMatrix::new(vec!["a b".into()], 1, vec![1.0], vec![]).unwrap();
        assert!(m.write_text(Vec::new()).is_err());
    }

    #[test]
    fn sidecar_roundtrip_and_sniffing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        let art = EmbeddingArtifact {
            walk: WalkConfig::default(),
            sgns: SgnsConfig::default(),
            matrix: sample(),
        };
        art.save(&path).unwrap();
        assert_eq!(EmbeddingArtifact::load(&path).unwrap(), art);
        assert_eq!(EmbeddingMatrix::load(&path).unwrap(), art.matrix);
    }

    #[test]
    fn lookup_unknown_word() {
        assert!(matches!(sample().lookup("emu"), Err(Error::UnknownWord(w)) if w == "emu"));
    }
}
