//! Unsupervised subword segmenters behind one interface.
//!
//! All segmenters work word-internally: a word is split into pieces whose
//! concatenation is the word itself. Continuation markers (default `##`) are
//! a presentation detail added by [`with_markers`]; [`Segmenter::segment`]
//! always returns bare morphemes.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;

mod bpe;
mod external;
mod morfessor;
mod unigram;

pub use bpe::{train_bpe, BpeModel};
pub use external::ExternalSegmentation;
pub use morfessor::{
    train_from_counts as train_morfessor_from_counts, train_morfessor, train_morfessor_traced, Dampening, MorfessorModel, MorfessorParams,
    MorfessorTrace,
};
pub use unigram::{train_unigram, train_unigram_traced, UnigramModel, UnigramParams, UnigramTrace};

pub const DEFAULT_MARKER: &str = "##";

/// Current model-file format version.
pub const MODEL_VERSION: u32 = 1;

pub trait Segmenter {
    /// Bare morphemes of `word`, or `None` when the word cannot be analysed
    /// (only imported segmentations can miss).
    fn segment(&self, word: &str) -> Option<Vec<String>>;

    /// Segmentation falling back to the unsplit word on a miss.
    fn segment_or_whole(&self, word: &str) -> Vec<String> {
        self.segment(word)
            .unwrap_or_else(|| alloc::vec![String::from(word)])
    }
}

impl<S: Segmenter + ?Sized> Segmenter for &S {
    fn segment(&self, word: &str) -> Option<Vec<String>> {
        (**self).segment(word)
    }
}

/// Prefixes every non-initial piece with `marker`.
pub fn with_markers(morphs: &[String], marker: &str) -> Vec<String> {
    morphs
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if i == 0 {
                m.clone()
            } else {
                let mut s = String::from(marker);
                s.push_str(m);
                s
            }
        })
        .collect()
}

/// Removes a leading continuation marker from each piece.
pub fn strip_markers(pieces: &[String], marker: &str) -> Vec<String> {
    pieces
        .iter()
        .map(|p| String::from(p.strip_prefix(marker).unwrap_or(p)))
        .collect()
}

/// Word-type counts over all tokens of a corpus.
pub fn word_counts(corpus: &[Sentence]) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for token in corpus.iter().flat_map(|s| s.tokens.iter()) {
        *counts.entry(token.surface.clone()).or_insert(0) += 1;
    }
    counts
}

/// Any trained or imported segmenter, tagged by method for the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SegmenterModel {
    Bpe(BpeModel),
    Unigram(UnigramModel),
    Morfessor(MorfessorModel),
    External(ExternalSegmentation),
}

impl SegmenterModel {
    pub fn method(&self) -> &'static str {
        match self {
            SegmenterModel::Bpe(_) => "bpe",
            SegmenterModel::Unigram(_) => "unigram",
            SegmenterModel::Morfessor(_) => "morfessor",
            SegmenterModel::External(_) => "external",
        }
    }

    /// The pieces a model treats as whole vocabulary items.
    pub fn vocabulary(&self) -> Vec<String> {
        match self {
            SegmenterModel::Bpe(m) => m.vocab().iter().cloned().collect(),
            SegmenterModel::Unigram(m) => m.pieces().keys().cloned().collect(),
            SegmenterModel::Morfessor(m) => m.lexicon().keys().cloned().collect(),
            SegmenterModel::External(m) => {
                let mut v: Vec<String> = m.iter().flat_map(|(_, ms)| ms.iter().cloned()).collect();
                v.sort();
                v.dedup();
                v
            }
        }
    }
}

impl Segmenter for SegmenterModel {
    fn segment(&self, word: &str) -> Option<Vec<String>> {
        match self {
            SegmenterModel::Bpe(m) => m.segment(word),
            SegmenterModel::Unigram(m) => m.segment(word),
            SegmenterModel::Morfessor(m) => m.segment(word),
            SegmenterModel::External(m) => m.segment(word),
        }
    }
}

/// Versioned envelope written to model files:
/// `{"version": 1, "method": "...", ...payload}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    #[serde(flatten)]
    pub model: SegmenterModel,
}

impl ModelFile {
    pub fn new(model: SegmenterModel) -> Self {
        ModelFile {
            version: MODEL_VERSION,
            model,
        }
    }
}

pub(crate) fn chars_of(word: &str) -> Vec<String> {
    word.chars().map(String::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn markers_round_trip() {
        let morphs = vec![String::from("walk"), String::from("ed")];
        let marked = with_markers(&morphs, DEFAULT_MARKER);
        assert_eq!(marked, vec![String::from("walk"), String::from("##ed")]);
        assert_eq!(strip_markers(&marked, DEFAULT_MARKER), morphs);
    }
}
