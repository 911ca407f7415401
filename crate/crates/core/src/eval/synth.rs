//! Planted-taxonomy benchmark generator.
//!
//! Words belong to latent classes, classes to superclasses. A member word
//! draws `class_share` of its feature tokens from its class pool and the
//! rest from a large global pool. Each class also has a frequent hub word
//! (its hypernym) whose features mix its own class, the sibling classes of
//! its superclass, and the global pool, which makes member/hub pairs look
//! like co-hyponyms to a plain similarity score. Filler words outside the
//! taxonomy draw only global features and serve as random relata.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pairs::{LabeledPairDataset, PairRecord, Relation};
use crate::error::{Error, Result};
use crate::util::{self, mix_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub classes: usize,
    pub superclasses: usize,
    pub members_per_class: usize,
    pub class_features: usize,
    pub global_features: usize,
    pub member_tokens: usize,
    pub hub_tokens: usize,
    pub class_share: f64,
    /// Share of a hub's tokens from its own class pool; the rest of
    /// `class_share` comes from sibling classes.
    pub hub_own_share: f64,
    pub fillers: usize,
    /// Pairs written per relation (cohyp, random, hyper).
    pub pairs_per_relation: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            classes: 20,
            superclasses: 5,
            members_per_class: 22,
            class_features: 50,
            global_features: 50_000,
            member_tokens: 2_000,
            hub_tokens: 8_000,
            class_share: 0.8,
            hub_own_share: 0.6,
            fillers: 40,
            pairs_per_relation: 440,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn word_count(&self) -> usize {
        self.classes * (self.members_per_class + 1) + self.fillers
    }

    fn validate(&self) -> Result<()> {
        let ok = self.classes >= 2
            && self.superclasses >= 2
            && self.classes.is_multiple_of(self.superclasses)
            && self.members_per_class >= 2
            && self.class_features > 0
            && self.global_features > 0
            && self.fillers > 0
            && (0.0..=1.0).contains(&self.class_share)
            && (0.0..=self.class_share).contains(&self.hub_own_share);
        if !ok {
            return Err(Error::contract(format!("invalid synthetic benchmark settings: {self:?}")));
        }
        let pairs_within = self.classes * self.members_per_class * (self.members_per_class - 1) / 2;
        let members = self.classes * self.members_per_class;
        if self.pairs_per_relation > pairs_within || self.pairs_per_relation > members {
            return Err(Error::contract(format!(
                "cannot draw {} distinct pairs per relation from this taxonomy",
                self.pairs_per_relation
            )));
        }
        Ok(())
    }
}

pub struct SynthCorpus {
    /// (word, feature, count), sorted by word then feature.
    pub counts: Vec<(String, String, u64)>,
    pub pairs: LabeledPairDataset,
    /// Latent class of every member and hub; fillers are absent.
    pub classes: BTreeMap<String, usize>,
}

fn member(c: usize, m: usize) -> String {
    format!("c{c:02}_m{m:02}")
}

fn hub(c: usize) -> String {
    format!("c{c:02}_hub")
}

fn filler(i: usize) -> String {
    format!("x{i:03}")
}

fn class_feature(c: usize, i: usize) -> String {
    format!("c{c:02}_f{i:03}")
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let per_super = cfg.classes / cfg.superclasses;
    let superclass = |c: usize| c / per_super;
    let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
    let mut classes = BTreeMap::new();

    let mut word_index = 0u64;
    let mut emit = |word: &str, draws: usize, pick: &mut dyn FnMut(&mut ChaCha8Rng) -> String, idx: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, idx));
        for _ in 0..draws {
            let f = pick(&mut rng);
            *counts.entry((word.to_owned(), f)).or_insert(0) += 1;
        }
    };
    let global = |rng: &mut ChaCha8Rng| format!("g{:05}", rng.gen_range(0..cfg.global_features));

    for c in 0..cfg.classes {
        for m in 0..cfg.members_per_class {
            let w = member(c, m);
            classes.insert(w.clone(), c);
            let mut pick = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(cfg.class_share) {
                    class_feature(c, rng.gen_range(0..cfg.class_features))
                } else {
                    global(rng)
                }
            };
            emit(&w, cfg.member_tokens, &mut pick, word_index);
            word_index += 1;
        }
        let h = hub(c);
        classes.insert(h.clone(), c);
        let siblings: Vec<usize> = (0..cfg.classes).filter(|&o| o != c && superclass(o) == superclass(c)).collect();
        let own_share = cfg.hub_own_share;
        let mut pick = |rng: &mut ChaCha8Rng| {
            let u: f64 = rng.gen();
            if u < own_share || (u < cfg.class_share && siblings.is_empty()) {
                class_feature(c, rng.gen_range(0..cfg.class_features))
            } else if u < cfg.class_share {
                let o = siblings[rng.gen_range(0..siblings.len())];
                class_feature(o, rng.gen_range(0..cfg.class_features))
            } else {
                global(rng)
            }
        };
        emit(&h, cfg.hub_tokens, &mut pick, word_index);
        word_index += 1;
    }
    for i in 0..cfg.fillers {
        emit(&filler(i), cfg.member_tokens, &mut |rng: &mut ChaCha8Rng| global(rng), word_index);
        word_index += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, u64::MAX));
    let n = cfg.pairs_per_relation;
    let mut records = Vec::with_capacity(3 * n);

    let mut cohyp = Vec::new();
    for c in 0..cfg.classes {
        for a in 0..cfg.members_per_class {
            for b in a + 1..cfg.members_per_class {
                cohyp.push((member(c, a), member(c, b)));
            }
        }
    }
    cohyp.shuffle(&mut rng);
    for (a, b) in cohyp.into_iter().take(n) {
        records.push(PairRecord::new(&a, &b, Relation::Cohyp, "synth"));
    }

    let mut hyper: Vec<(String, String)> = (0..cfg.classes)
        .flat_map(|c| (0..cfg.members_per_class).map(move |m| (member(c, m), hub(c))))
        .collect();
    hyper.shuffle(&mut rng);
    for (a, b) in hyper.into_iter().take(n) {
        records.push(PairRecord::new(&a, &b, Relation::Hyper, "synth"));
    }

    let mut random: Vec<(String, String)> = (0..cfg.classes)
        .flat_map(|c| (0..cfg.members_per_class).map(move |m| member(c, m)))
        .flat_map(|m| (0..cfg.fillers).map(move |i| (m.clone(), filler(i))))
        .collect();
    random.shuffle(&mut rng);
    for (a, b) in random.into_iter().take(n) {
        records.push(PairRecord::new(&a, &b, Relation::Random, "synth"));
    }

    Ok(SynthCorpus {
        counts: counts.into_iter().map(|((w, f), c)| (w, f, c)).collect(),
        pairs: LabeledPairDataset::new("synth", records)?,
        classes,
    })
}

impl SynthCorpus {
    pub fn write_counts<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (w, f, c) in &self.counts {
            writeln!(out, "{w}\t{f}\t{c}")?;
        }
        out.flush()
    }

    /// Writes `counts.tsv` and `pairs.tsv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
        let counts = dir.join("counts.tsv");
        let pairs = dir.join("pairs.tsv");
        self.write_counts(util::create_file(&counts)?).map_err(|e| Error::io(&counts, e))?;
        self.pairs.write_tsv(util::create_file(&pairs)?).map_err(|e| Error::io(&pairs, e))?;
        Ok((counts, pairs))
    }
}
