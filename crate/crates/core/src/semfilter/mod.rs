//! Caption-pair filtering over the WordNet noun hierarchy.
//!
//! Each noun is summarised by a depth histogram of its hypernym closure:
//! every ancestor synset (the noun's own synsets included) adds one to the
//! bin of its depth. Two captions are kept as a pair when some noun of the
//! first and some noun of the second have histograms with cosine
//! similarity at least `threshold`.
//!
//! Depth is the shortest distance to any root. Lemmas with several senses
//! take the union of all their senses' closures.

mod wndb;

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lexicon::{tokenize, Caption};

pub const MINI_WORDNET_INDEX: &str = include_str!("../../data/mini-wordnet/index.noun");
pub const MINI_WORDNET_DATA: &str = include_str!("../../data/mini-wordnet/data.noun");
pub const STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Irregular plural -> lemma, consulted before suffix stripping.
pub const IRREGULAR_LEMMAS: &[(&str, &str)] = &[
    ("people", "person"),
    ("men", "man"),
    ("women", "woman"),
    ("children", "child"),
    ("mice", "mouse"),
    ("geese", "goose"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("sheep", "sheep"),
];

/// Synset offset in `data.noun`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId(pub u64);

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}", self.0)
    }
}

impl core::str::FromStr for SynsetId {
    type Err = core::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(SynsetId)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordnetFile {
    Index,
    Data,
}

impl fmt::Display for WordnetFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WordnetFile::Index => "index.noun",
            WordnetFile::Data => "data.noun",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordnetError {
    #[error("{file} line {line}: {message}")]
    Parse {
        file: WordnetFile,
        line: usize,
        message: String,
    },
    #[error("hypernym cycle through synset {0}")]
    Cycle(SynsetId),
    #[error("lemma `{0}` is not in the noun index")]
    UnknownLemma(String),
    #[error("invalid filter config: {0}")]
    InvalidConfig(&'static str),
}

/// Parsed noun hierarchy with precomputed root depths.
#[derive(Debug, Clone)]
pub struct WordnetGraph {
    synsets: BTreeMap<SynsetId, Vec<String>>,
    hypernyms: BTreeMap<SynsetId, Vec<SynsetId>>,
    lemma_index: BTreeMap<String, Vec<SynsetId>>,
    depth: BTreeMap<SynsetId, usize>,
    max_depth: usize,
    stopwords: BTreeSet<String>,
}

/// Parses a one-word-per-line stopword list; `#` lines are comments.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

impl WordnetGraph {
    /// Parses and validates a noun database. The shipped stopword list is
    /// attached; see [`WordnetGraph::with_stopwords`].
    pub fn parse(index: &str, data: &str) -> Result<Self, WordnetError> {
        let raw = wndb::parse(index, data)?;
        let order = topological_order(&raw.hypernyms)?;
        let mut depth: BTreeMap<SynsetId, usize> = BTreeMap::new();
        for id in order {
            let d = raw.hypernyms[&id]
                .iter()
                .map(|p| depth[p] + 1)
                .min()
                .unwrap_or(0);
            depth.insert(id, d);
        }
        let max_depth = depth.values().copied().max().unwrap_or(0);
        Ok(Self {
            synsets: raw.synsets,
            hypernyms: raw.hypernyms,
            lemma_index: raw.lemma_index,
            depth,
            max_depth,
            stopwords: parse_stopwords(STOPWORDS),
        })
    }

    /// The bundled mini database.
    pub fn mini() -> Self {
        Self::parse(MINI_WORDNET_INDEX, MINI_WORDNET_DATA).expect("bundled fixture is valid")
    }

    pub fn with_stopwords(mut self, stopwords: BTreeSet<String>) -> Self {
        self.stopwords = stopwords;
        self
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn num_synsets(&self) -> usize {
        self.synsets.len()
    }

    pub fn synset_ids(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.synsets.keys().copied()
    }

    pub fn lemmas_of(&self, id: SynsetId) -> Option<&[String]> {
        self.synsets.get(&id).map(Vec::as_slice)
    }

    pub fn hypernyms_of(&self, id: SynsetId) -> Option<&[SynsetId]> {
        self.hypernyms.get(&id).map(Vec::as_slice)
    }

    pub fn depth_of(&self, id: SynsetId) -> Option<usize> {
        self.depth.get(&id).copied()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.lemma_index.keys().map(String::as_str)
    }

    pub fn synsets_of(&self, lemma: &str) -> Option<&[SynsetId]> {
        self.lemma_index.get(lemma).map(Vec::as_slice)
    }

    pub fn contains_lemma(&self, lemma: &str) -> bool {
        self.lemma_index.contains_key(lemma)
    }

    /// Maps a surface token to its index lemma: irregular table, then
    /// `-ies -> -y`, `-es`, `-s` stripping when the stem is indexed,
    /// otherwise the lower-cased token itself.
    pub fn lemmatize(&self, word: &str) -> String {
        let w = word.to_lowercase();
        if let Some((_, lemma)) = IRREGULAR_LEMMAS.iter().find(|(p, _)| *p == w) {
            return lemma.to_string();
        }
        if let Some(stem) = w.strip_suffix("ies") {
            let y = alloc::format!("{stem}y");
            if self.contains_lemma(&y) {
                return y;
            }
        }
        for suffix in ["es", "s"] {
            if let Some(stem) = w.strip_suffix(suffix) {
                if !stem.is_empty() && self.contains_lemma(stem) {
                    return stem.to_string();
                }
            }
        }
        w
    }

    /// Nouns of a caption in order of appearance, truncated to `count`.
    /// A token is a noun when its lemma is indexed and neither the token nor
    /// the lemma is a stopword.
    pub fn extract_nouns(&self, caption: &Caption, count: NounCount) -> Vec<String> {
        let limit = match count {
            NounCount::All => usize::MAX,
            NounCount::First(n) => n,
        };
        tokenize(&caption.text)
            .into_iter()
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| self.lemmatize(&t))
            .filter(|l| !self.stopwords.contains(l) && self.contains_lemma(l))
            .take(limit)
            .collect()
    }

    /// Every ancestor of every sense of `lemma` (senses included), with its
    /// root depth, sorted by synset id.
    pub fn hypernym_closure(&self, lemma: &str) -> Result<Vec<(SynsetId, usize)>, WordnetError> {
        let start = self
            .synsets_of(lemma)
            .ok_or_else(|| WordnetError::UnknownLemma(lemma.to_string()))?;
        let mut seen: BTreeSet<SynsetId> = BTreeSet::new();
        let mut stack: Vec<SynsetId> = start.to_vec();
        while let Some(id) = stack.pop() {
            if seen.insert(id) {
                stack.extend(self.hypernyms[&id].iter().copied());
            }
        }
        Ok(seen.into_iter().map(|id| (id, self.depth[&id])).collect())
    }

    pub fn descriptor(&self, lemma: &str) -> Result<DepthDescriptor, WordnetError> {
        let mut v = vec![0u32; self.max_depth + 1];
        for (_, d) in self.hypernym_closure(lemma)? {
            v[d] += 1;
        }
        Ok(DepthDescriptor(v))
    }

    /// Decides whether a re-captioned web image still talks about what the
    /// stored caption talked about.
    pub fn filter_pair(&self, stored: &Caption, regenerated: &Caption, cfg: &FilterConfig) -> FilterDecision {
        let nouns_q1 = self.extract_nouns(stored, cfg.noun_count);
        let nouns_q2 = self.extract_nouns(regenerated, cfg.noun_count);
        if nouns_q1.is_empty() || nouns_q2.is_empty() {
            return FilterDecision {
                kept: false,
                best_pair: None,
                best_similarity: 0.0,
                nouns_q1,
                nouns_q2,
                reason: Some(RejectReason::NoNouns),
            };
        }
        let describe = |ns: &[String]| -> Vec<DepthDescriptor> {
            ns.iter()
                .map(|n| self.descriptor(n).expect("extracted nouns are indexed"))
                .collect()
        };
        let d1 = describe(&nouns_q1);
        let d2 = describe(&nouns_q2);
        let mut best = (0usize, 0usize, f64::NEG_INFINITY);
        for (i, a) in d1.iter().enumerate() {
            for (j, b) in d2.iter().enumerate() {
                let s = cosine_similarity(a, b);
                if s > best.2 {
                    best = (i, j, s);
                }
            }
        }
        let kept = best.2 >= cfg.threshold;
        FilterDecision {
            kept,
            best_pair: Some((nouns_q1[best.0].clone(), nouns_q2[best.1].clone())),
            best_similarity: best.2,
            nouns_q1,
            nouns_q2,
            reason: (!kept).then_some(RejectReason::BelowThreshold),
        }
    }
}

/// Kahn ordering from roots downward; fails on any cycle.
fn topological_order(
    hypernyms: &BTreeMap<SynsetId, Vec<SynsetId>>,
) -> Result<Vec<SynsetId>, WordnetError> {
    let mut pending: BTreeMap<SynsetId, usize> = BTreeMap::new();
    let mut children: BTreeMap<SynsetId, Vec<SynsetId>> = BTreeMap::new();
    for (id, parents) in hypernyms {
        pending.insert(*id, parents.len());
        for p in parents {
            children.entry(*p).or_default().push(*id);
        }
    }
    let mut queue: VecDeque<SynsetId> = pending
        .iter()
        .filter(|(_, n)| **n == 0)
        .map(|(id, _)| *id)
        .collect();
    let mut order = Vec::with_capacity(hypernyms.len());
    while let Some(id) = queue.pop_front() {
        order.push(id);
        for c in children.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
            let n = pending.get_mut(c).expect("child is a synset");
            *n -= 1;
            if *n == 0 {
                queue.push_back(*c);
            }
        }
    }
    if order.len() != hypernyms.len() {
        let stuck = pending
            .iter()
            .find(|(_, n)| **n > 0)
            .map(|(id, _)| *id)
            .expect("some synset is unresolved");
        return Err(WordnetError::Cycle(stuck));
    }
    Ok(order)
}

/// Hypernym depth histogram of one noun.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthDescriptor(pub Vec<u32>);

impl DepthDescriptor {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// `a . b / (|a| |b|)`, zero-padding the shorter vector; 0 when either
/// vector is all zero.
pub fn cosine_similarity(a: &DepthDescriptor, b: &DepthDescriptor) -> f64 {
    let n = a.0.len().max(b.0.len());
    let at = |v: &DepthDescriptor, i: usize| v.0.get(i).copied().unwrap_or(0) as f64;
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (x, y) = (at(a, i), at(b, i));
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (libm::sqrt(na) * libm::sqrt(nb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NounCount {
    First(usize),
    All,
}

impl fmt::Display for NounCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NounCount::First(n) => write!(f, "{n}"),
            NounCount::All => f.write_str("ALL"),
        }
    }
}

impl core::str::FromStr for NounCount {
    type Err = WordnetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(NounCount::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(NounCount::First(n)),
            _ => Err(WordnetError::InvalidConfig("noun count must be >= 1 or ALL")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub threshold: f64,
    pub noun_count: NounCount,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            threshold: 0.6,
            noun_count: NounCount::First(2),
        }
    }
}

impl FilterConfig {
    pub fn new(threshold: f64, noun_count: NounCount) -> Result<Self, WordnetError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(WordnetError::InvalidConfig("threshold must be in [0, 1]"));
        }
        if noun_count == NounCount::First(0) {
            return Err(WordnetError::InvalidConfig("noun count must be >= 1 or ALL"));
        }
        Ok(Self {
            threshold,
            noun_count,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    NoNouns,
    BelowThreshold,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::NoNouns => "no nouns",
            RejectReason::BelowThreshold => "below threshold",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterDecision {
    pub kept: bool,
    pub best_pair: Option<(String, String)>,
    pub best_similarity: f64,
    pub nouns_q1: Vec<String>,
    pub nouns_q2: Vec<String>,
    pub reason: Option<RejectReason>,
}
