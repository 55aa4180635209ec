//! Per-sentence predictor variables for the synthesis, fusion and bilingual
//! feature analyses, and assembly of complete-case model rows.
//!
//! Ratios with a zero denominator are left out of a sentence's predictors
//! rather than imputed; [`PredictorTable::model_rows`] then drops that
//! sentence from any model that uses them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{Sentence, Token};
use crate::fusion_annotation::Projection;
use crate::segmenters::Segmenter;

/// Ordered (name, value) list as emitted by the compute functions.
pub type Predictors = Vec<(String, f64)>;

/// A subword or morpheme segmenter with the name used in predictor columns.
pub type NamedSegmenter<'a> = (&'a str, &'a dyn Segmenter);

pub const NOUN_VERB_POS: [&str; 2] = ["NOUN", "VERB"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorRow {
    pub sentence: usize,
    pub predictors: BTreeMap<String, f64>,
    pub response: f64,
}

fn push(out: &mut Predictors, name: impl Into<String>, value: f64) {
    out.push((name.into(), value));
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

/// Characters of the sentence with tokens joined by single spaces.
pub fn char_count(sentence: &Sentence) -> usize {
    let chars: usize = sentence.tokens.iter().map(|t| t.surface.chars().count()).sum();
    chars + sentence.tokens.len().saturating_sub(1)
}

fn words(sentence: &Sentence) -> impl Iterator<Item = &Token> {
    sentence.tokens.iter().filter(|t| t.is_countable_word())
}

/// Subword pieces a model produces over every token of the sentence.
pub fn subword_count(sentence: &Sentence, model: &dyn Segmenter) -> usize {
    sentence
        .tokens
        .iter()
        .map(|t| model.segment_or_whole(&t.surface).len())
        .sum()
}

/// Length, morpheme and subword-synthesis predictors. `None` when the
/// sentence has no countable words.
pub fn compute_predictors_synthesis(
    sentence: &Sentence,
    morphemes: Option<&dyn Segmenter>,
    subword_models: &[NamedSegmenter<'_>],
) -> Option<Predictors> {
    let word_count = words(sentence).count() as f64;
    if word_count == 0.0 {
        return None;
    }
    let mut out = Predictors::new();
    push(&mut out, "char.count", char_count(sentence) as f64);
    push(&mut out, "word.count", word_count);
    if let Some(seg) = morphemes {
        let morphs = |t: &Token| seg.segment_or_whole(&t.surface).len() as f64;
        let morph_count: f64 = words(sentence).map(morphs).sum();
        push(&mut out, "morph.count", morph_count);
        push(&mut out, "synthesis", morph_count / word_count);
        let nv: Vec<&Token> = words(sentence).filter(|t| t.has_pos(&NOUN_VERB_POS)).collect();
        push(&mut out, "N+V.word.count", nv.len() as f64);
        if !nv.is_empty() {
            let nv_morphs: f64 = nv.iter().map(|t| morphs(t)).sum();
            push(&mut out, "N+V.morph.count", nv_morphs);
            push(&mut out, "N+V.synthesis", nv_morphs / word_count);
        }
    }
    for (name, model) in subword_models {
        let sw = subword_count(sentence, *model) as f64;
        push(&mut out, format!("sw{name}.count"), sw);
        push(&mut out, format!("syn.sw{name}"), sw / word_count);
    }
    Some(out)
}

/// Fusion values of each sentence's verbs in token order; `None` entries are
/// verbs whose paradigm was not annotated.
pub fn verb_fusion_by_sentence(projection: &Projection) -> BTreeMap<usize, Vec<Option<f64>>> {
    let mut out: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
    for t in &projection.tokens {
        out.entry(t.sentence).or_default().push(t.fusion);
    }
    out
}

/// Fusion predictors. `verb_fusion` lists the sentence's verbs; if any of
/// them is unannotated, the fusion-derived predictors are omitted.
pub fn compute_predictors_fusion(
    sentence: &Sentence,
    verb_fusion: &[Option<f64>],
    subword_models: &[NamedSegmenter<'_>],
) -> Option<Predictors> {
    let word_count = words(sentence).count() as f64;
    if word_count == 0.0 {
        return None;
    }
    let verb_count = verb_fusion.len() as f64;
    let fusion: Option<f64> = verb_fusion.iter().copied().sum();
    let mut out = Predictors::new();
    push(&mut out, "char.count", char_count(sentence) as f64);
    push(&mut out, "word.count", word_count);
    push(&mut out, "verb.count", verb_count);
    if let Some(f) = fusion {
        push(&mut out, "fusion", f);
        if let Some(r) = ratio(f, verb_count) {
            push(&mut out, "R.fusion.verb", r);
        }
        push(&mut out, "R.fusion.word", f / word_count);
    }
    for (name, model) in subword_models {
        let sw = subword_count(sentence, *model) as f64;
        push(&mut out, format!("sw{name}.count"), sw);
        if let Some(f) = fusion {
            if let Some(r) = ratio(f, sw) {
                push(&mut out, format!("R.fusion.sw{name}"), r);
            }
        }
    }
    Some(out)
}

/// Morphological features over the countable words of a sentence.
pub fn feature_count(sentence: &Sentence) -> usize {
    words(sentence).map(|t| t.feats.len()).sum()
}

/// Source/reference length, subword-synthesis and feature predictors with
/// their differences. Models are paired by name: `src_models[i]` and
/// `ref_models[i]` must segment the same method on either side.
pub fn compute_predictors_bilingual(
    src: &Sentence,
    reference: &Sentence,
    src_models: &[NamedSegmenter<'_>],
    ref_models: &[NamedSegmenter<'_>],
) -> Option<Predictors> {
    let src_words = words(src).count() as f64;
    let ref_words = words(reference).count() as f64;
    if src_words == 0.0 || ref_words == 0.0 {
        return None;
    }
    let mut out = Predictors::new();
    push(&mut out, "src.char.count", char_count(src) as f64);
    push(&mut out, "ref.char.count", char_count(reference) as f64);
    push(&mut out, "src.word.count", src_words);
    push(&mut out, "ref.word.count", ref_words);
    for ((name, sm), (_, rm)) in src_models.iter().zip(ref_models) {
        let s = subword_count(src, *sm) as f64;
        let r = subword_count(reference, *rm) as f64;
        push(&mut out, format!("src.{name}.count"), s);
        push(&mut out, format!("ref.{name}.count"), r);
        push(&mut out, format!("src.SYN.{name}"), s / src_words);
        push(&mut out, format!("ref.SYN.{name}"), r / ref_words);
    }
    let sf = feature_count(src) as f64;
    let rf = feature_count(reference) as f64;
    let (sr, rr) = (sf / src_words, rf / ref_words);
    push(&mut out, "src.feat.count", sf);
    push(&mut out, "src.R.feat.token", sr);
    push(&mut out, "ref.feat.count", rf);
    push(&mut out, "ref.R.feat.token", rr);
    push(&mut out, "src-ref.feat.count", sf - rf);
    push(&mut out, "src-ref.R.feat.token", sr - rr);
    push(&mut out, "ref-src.feat.count", rf - sf);
    push(&mut out, "ref-src.R.feat.token", rr - sr);
    Some(out)
}

/// Predictor values per sentence, with columns in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PredictorTable {
    pub columns: Vec<String>,
    pub rows: Vec<(usize, BTreeMap<String, f64>)>,
    /// Sentences for which no predictors could be computed.
    pub skipped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRows {
    pub rows: Vec<PredictorRow>,
    /// Sentences left out for lacking a predictor or a response.
    pub excluded: Vec<usize>,
}

impl PredictorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sentence: usize, predictors: Option<Predictors>) {
        let Some(predictors) = predictors else {
            self.skipped.push(sentence);
            return;
        };
        for (name, _) in &predictors {
            if !self.columns.contains(name) {
                self.columns.push(name.clone());
            }
        }
        self.rows.push((sentence, predictors.into_iter().collect()));
    }

    /// Complete-case rows for a model over `predictors` (all columns when
    /// empty) against the given per-sentence responses.
    pub fn model_rows(&self, predictors: &[String], responses: &BTreeMap<usize, f64>) -> ModelRows {
        let names: Vec<String> = if predictors.is_empty() {
            self.columns.clone()
        } else {
            predictors.to_vec()
        };
        let mut rows = Vec::new();
        let mut excluded: BTreeSet<usize> = self.skipped.iter().copied().collect();
        for (sentence, values) in &self.rows {
            let picked: Option<BTreeMap<String, f64>> = names
                .iter()
                .map(|n| values.get(n).map(|v| (n.clone(), *v)))
                .collect();
            match (picked, responses.get(sentence)) {
                (Some(predictors), Some(&response)) => rows.push(PredictorRow {
                    sentence: *sentence,
                    predictors,
                    response,
                }),
                _ => {
                    excluded.insert(*sentence);
                }
            }
        }
        ModelRows {
            rows,
            excluded: excluded.into_iter().collect(),
        }
    }
}
