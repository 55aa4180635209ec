//! Corpus data model: tokens, sentences, frequency tables, gold segmentations
//! and frequency binning.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Morphological features of one token, `key=value`, keys unique.
pub type FeatureSet = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: Option<String>,
    pub upos: Option<String>,
    pub feats: FeatureSet,
}

impl Token {
    /// A bare token carrying only its surface form.
    pub fn word(surface: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            lemma: None,
            upos: None,
            feats: FeatureSet::new(),
        }
    }

    pub fn has_pos(&self, tags: &[&str]) -> bool {
        self.upos.as_deref().is_some_and(|p| tags.contains(&p))
    }

    /// True for tokens that count as words: not tagged as punctuation,
    /// symbol or numeral, and containing at least one alphabetic character.
    pub fn is_countable_word(&self) -> bool {
        if self.has_pos(&["PUNCT", "NUM", "SYM"]) {
            return false;
        }
        self.surface.chars().any(char::is_alphabetic)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub raw: String,
}

impl Sentence {
    /// Splits a pre-tokenized line on any whitespace. Blank lines yield `None`.
    pub fn from_plain_line(line: &str) -> Option<Sentence> {
        let tokens: Vec<Token> = line.split_whitespace().map(Token::word).collect();
        if tokens.is_empty() {
            return None;
        }
        Some(Sentence {
            tokens,
            raw: line.to_owned(),
        })
    }

    pub fn from_tokens(tokens: Vec<Token>) -> Sentence {
        let raw = tokens
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        Sentence { tokens, raw }
    }

    pub fn surfaces(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.surface.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Surface-form counts over a training corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    counts: BTreeMap<String, u64>,
    total: u64,
    lowercase: bool,
}

impl FrequencyTable {
    pub fn new(lowercase: bool) -> Self {
        FrequencyTable {
            counts: BTreeMap::new(),
            total: 0,
            lowercase,
        }
    }

    /// Counts exact surface forms; with `lowercase` both the corpus and later
    /// lookups are lowercased.
    pub fn from_sentences(corpus: &[Sentence], lowercase: bool) -> Self {
        let mut table = FrequencyTable::new(lowercase);
        for token in corpus.iter().flat_map(|s| s.tokens.iter()) {
            table.add(&token.surface, 1);
        }
        table
    }

    pub fn add(&mut self, form: &str, count: u64) {
        let key = self.normalize(form);
        *self.counts.entry(key).or_insert(0) += count;
        self.total += count;
    }

    fn normalize(&self, form: &str) -> String {
        if self.lowercase {
            form.to_lowercase()
        } else {
            form.to_owned()
        }
    }

    /// Count of `form`; unseen forms count 0.
    pub fn count(&self, form: &str) -> u64 {
        if self.lowercase {
            self.counts.get(&form.to_lowercase()).copied().unwrap_or(0)
        } else {
            self.counts.get(form).copied().unwrap_or(0)
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Default bin edges: rare (< 100), mid (100..1000) and frequent (>= 1000).
pub const DEFAULT_FREQ_EDGES: [i64; 3] = [0, 100, 1000];

/// Half-open binning `[e_i, e_{i+1})`; counts at or above the last edge fall
/// in the final bin.
pub fn frequency_bin(count: i64, edges: &[i64]) -> Result<usize> {
    if edges.is_empty() || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadEdges);
    }
    if count < 0 {
        return Err(Error::NegativeCount(count));
    }
    if count < edges[0] {
        return Err(Error::BelowFirstEdge {
            count,
            first_edge: edges[0],
        });
    }
    // number of edges <= count, minus one
    Ok(edges.partition_point(|&e| e <= count) - 1)
}

/// Human-readable label for bin `index`, e.g. `[100,1000)` or `>=1000`.
pub fn bin_label(index: usize, edges: &[i64]) -> String {
    match (edges.get(index), edges.get(index + 1)) {
        (Some(lo), Some(hi)) => alloc::format!("[{lo},{hi})"),
        (Some(lo), None) => alloc::format!(">={lo}"),
        _ => String::from("?"),
    }
}

/// True when `morphs` concatenate to `word` under lowercase comparison after
/// removing every character in `markers` from both sides.
pub fn concatenates_to(word: &str, morphs: &[String], markers: &[char]) -> bool {
    let norm = |s: &str| -> String {
        s.chars()
            .filter(|c| !markers.contains(c))
            .flat_map(char::to_lowercase)
            .collect()
    };
    let joined: String = morphs.iter().map(|m| norm(m)).collect();
    !joined.is_empty() && joined == norm(word)
}

/// Gold morpheme segmentations keyed by word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSegmentationLexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl GoldSegmentationLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry after checking the concatenation invariant. Duplicate
    /// words are rejected; the first entry wins.
    pub fn insert(&mut self, word: &str, morphs: Vec<String>, markers: &[char]) -> Result<()> {
        if morphs.iter().any(String::is_empty) || !concatenates_to(word, &morphs, markers) {
            return Err(Error::ConcatMismatch {
                word: word.to_owned(),
                morphs,
            });
        }
        if self.entries.contains_key(word) {
            return Err(Error::InvalidArgument(alloc::format!(
                "duplicate entry for {word:?}"
            )));
        }
        self.entries.insert(word.to_owned(), morphs);
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[String]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(w, m)| (w.as_str(), m.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
