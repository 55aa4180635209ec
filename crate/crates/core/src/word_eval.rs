//! Word-level translation accuracy for target parts of speech, stratified by
//! morphological and frequency axes, plus aggregation of human scores.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::aligner::SentenceAlignment;
use crate::corpus::{bin_label, frequency_bin, FrequencyTable, Sentence};
use crate::segmenters::Segmenter;
use crate::{Error, Result};

/// Minimum cell size below which stratified means are withheld.
pub const DEFAULT_MIN_SAMPLES: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordRecord {
    pub sentence: usize,
    pub token: usize,
    pub surface: String,
    pub pos: String,
    pub morph_count: Option<usize>,
    pub fusion: Option<f64>,
    pub train_freq: u64,
    pub in_vocab: bool,
    pub accuracy: u8,
    /// Hypothesis surfaces linked to this word, space-joined; empty when
    /// unaligned.
    pub aligned_hyp_surface: String,
}

/// One record per reference token whose POS is in `pos_filter`. A word is
/// accurate when any linked hypothesis token has the identical surface.
pub fn word_accuracy(
    reference: &Sentence,
    hypothesis: &Sentence,
    alignment: &SentenceAlignment,
    pos_filter: &[&str],
    casefold: bool,
) -> Vec<WordRecord> {
    let same = |a: &str, b: &str| {
        if casefold {
            a.to_lowercase() == b.to_lowercase()
        } else {
            a == b
        }
    };
    reference
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.has_pos(pos_filter))
        .map(|(i, t)| {
            let linked: Vec<&str> = alignment
                .hyp_for(i)
                .filter_map(|j| hypothesis.tokens.get(j))
                .map(|h| h.surface.as_str())
                .collect();
            let hit = linked.iter().find(|h| same(h, &t.surface));
            WordRecord {
                sentence: alignment.sentence,
                token: i,
                surface: t.surface.clone(),
                pos: t.upos.clone().unwrap_or_default(),
                morph_count: None,
                fusion: None,
                train_freq: 0,
                in_vocab: false,
                accuracy: u8::from(hit.is_some()),
                // a matching token is reported first
                aligned_hyp_surface: match hit {
                    Some(h) => String::from(*h),
                    None => linked.join(" "),
                },
            }
        })
        .collect()
}

/// Extra information attached to records by [`annotate_records`].
pub struct RecordAnnotations<'a> {
    pub freq_table: &'a FrequencyTable,
    /// Words that exist as a single piece in the MT model vocabulary.
    pub model_vocab: &'a BTreeSet<String>,
    /// Morpheme counts from a segmentation source (synthesis analysis).
    pub segmenter: Option<&'a dyn Segmenter>,
    /// Projected fusion values keyed by (sentence, token).
    pub fusion: Option<&'a BTreeMap<(usize, usize), f64>>,
}

pub fn annotate_records(records: &mut [WordRecord], ann: &RecordAnnotations<'_>) {
    for r in records.iter_mut() {
        r.train_freq = ann.freq_table.count(&r.surface);
        r.in_vocab = ann.model_vocab.contains(&r.surface);
        if let Some(seg) = ann.segmenter {
            r.morph_count = seg.segment(&r.surface).map(|m| m.len());
        }
        if let Some(fusion) = ann.fusion {
            r.fusion = fusion.get(&(r.sentence, r.token)).copied();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    MorphCount,
    FusionBinary,
    FreqBin,
    InVocab,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::MorphCount => "morph_count",
            Axis::FusionBinary => "fusion",
            Axis::FreqBin => "freq_bin",
            Axis::InVocab => "in_vocab",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "morph_count" | "morph-count" | "synthesis" => Some(Axis::MorphCount),
            "fusion" | "fusion_binary" | "fusion-binary" => Some(Axis::FusionBinary),
            "freq_bin" | "freq-bin" | "freq" => Some(Axis::FreqBin),
            "in_vocab" | "in-vocab" | "vocab" => Some(Axis::InVocab),
            _ => None,
        }
    }
}

/// Stratum value along one axis. Ordering is numeric where it matters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxisValue {
    MorphCount(usize),
    /// false: fusion = 0, true: fusion > 0
    Fusional(bool),
    FreqBin(usize),
    InVocab(bool),
}

impl AxisValue {
    pub fn label(&self, freq_edges: &[i64]) -> String {
        match self {
            AxisValue::MorphCount(n) => n.to_string(),
            AxisValue::Fusional(false) => String::from("fusion=0"),
            AxisValue::Fusional(true) => String::from("fusion>0"),
            AxisValue::FreqBin(b) => bin_label(*b, freq_edges),
            AxisValue::InVocab(true) => String::from("in-vocab"),
            AxisValue::InVocab(false) => String::from("out-of-vocab"),
        }
    }
}

fn axis_value(record: &WordRecord, axis: Axis, freq_edges: &[i64]) -> Result<Option<AxisValue>> {
    Ok(match axis {
        Axis::MorphCount => record.morph_count.map(AxisValue::MorphCount),
        Axis::FusionBinary => record.fusion.map(|f| AxisValue::Fusional(f > 0.0)),
        Axis::FreqBin => {
            let count = i64::try_from(record.train_freq).unwrap_or(i64::MAX);
            Some(AxisValue::FreqBin(frequency_bin(count, freq_edges)?))
        }
        Axis::InVocab => Some(AxisValue::InVocab(record.in_vocab)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumCell {
    pub key: Vec<AxisValue>,
    pub labels: Vec<String>,
    pub n: usize,
    pub correct: usize,
    /// Withheld when `n < min_samples`.
    pub mean_accuracy: Option<f64>,
    pub suppressed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedTable {
    pub axes: Vec<Axis>,
    pub min_samples: usize,
    pub cells: Vec<StratumCell>,
    /// Records lacking a value on some axis.
    pub excluded: usize,
}

/// Groups records by their values on `axes` (cells in key order) and reports
/// mean accuracy per cell.
pub fn stratify(
    records: &[WordRecord],
    axes: &[Axis],
    min_samples: usize,
    freq_edges: &[i64],
) -> Result<StratifiedTable> {
    if axes.is_empty() {
        return Err(Error::InvalidArgument(String::from("no stratification axis")));
    }
    let mut groups: BTreeMap<Vec<AxisValue>, (usize, usize)> = BTreeMap::new();
    let mut excluded = 0;
    'records: for r in records {
        let mut key = Vec::with_capacity(axes.len());
        for &axis in axes {
            match axis_value(r, axis, freq_edges)? {
                Some(v) => key.push(v),
                None => {
                    excluded += 1;
                    continue 'records;
                }
            }
        }
        let cell = groups.entry(key).or_insert((0, 0));
        cell.0 += 1;
        cell.1 += usize::from(r.accuracy);
    }
    let cells = groups
        .into_iter()
        .map(|(key, (n, correct))| {
            let suppressed = n < min_samples;
            StratumCell {
                labels: key.iter().map(|v| v.label(freq_edges)).collect(),
                key,
                n,
                correct,
                mean_accuracy: (!suppressed).then(|| correct as f64 / n as f64),
                suppressed,
            }
        })
        .collect();
    Ok(StratifiedTable {
        axes: axes.to_vec(),
        min_samples,
        cells,
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HumanScore {
    pub sentence: usize,
    pub token: usize,
    /// 1 (unrelated lemma) to 4 (same lemma).
    pub semantic: u8,
    /// 1 (wrong inflection) to 3 (same, correct inflection).
    pub grammar: u8,
}

impl HumanScore {
    pub fn new(sentence: usize, token: usize, semantic: u8, grammar: u8) -> Result<Self> {
        if !(1..=4).contains(&semantic) {
            return Err(Error::OutOfRange(format!("semantic score {semantic} (1-4)")));
        }
        if !(1..=3).contains(&grammar) {
            return Err(Error::OutOfRange(format!("grammar score {grammar} (1-3)")));
        }
        Ok(HumanScore {
            sentence,
            token,
            semantic,
            grammar,
        })
    }
}

/// Score histograms of one stratum. Index `k` holds score `k + 1`; the
/// `zero_*` arrays count the records among them with automatic accuracy 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreHistogram {
    pub semantic: [u64; 4],
    pub semantic_zero_accuracy: [u64; 4],
    pub grammar: [u64; 3],
    pub grammar_zero_accuracy: [u64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanStratum {
    pub key: Vec<AxisValue>,
    pub labels: Vec<String>,
    pub histogram: ScoreHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanAggregation {
    pub axes: Vec<Axis>,
    pub strata: Vec<HumanStratum>,
    /// Scores that matched no record, as (sentence, token).
    pub unmatched: Vec<(usize, usize)>,
    pub joined: usize,
}

/// Joins scores to records and builds per-stratum histograms.
pub fn aggregate_human_scores(
    scores: &[HumanScore],
    records: &[WordRecord],
    axes: &[Axis],
    freq_edges: &[i64],
) -> Result<HumanAggregation> {
    let index: BTreeMap<(usize, usize), &WordRecord> =
        records.iter().map(|r| ((r.sentence, r.token), r)).collect();
    let mut strata: BTreeMap<Vec<AxisValue>, ScoreHistogram> = BTreeMap::new();
    let mut unmatched = Vec::new();
    let mut joined = 0;
    'scores: for s in scores {
        let Some(record) = index.get(&(s.sentence, s.token)) else {
            unmatched.push((s.sentence, s.token));
            continue;
        };
        let mut key = Vec::with_capacity(axes.len());
        for &axis in axes {
            match axis_value(record, axis, freq_edges)? {
                Some(v) => key.push(v),
                None => continue 'scores,
            }
        }
        joined += 1;
        let h = strata.entry(key).or_default();
        let (sem, gra) = (usize::from(s.semantic - 1), usize::from(s.grammar - 1));
        h.semantic[sem] += 1;
        h.grammar[gra] += 1;
        if record.accuracy == 0 {
            h.semantic_zero_accuracy[sem] += 1;
            h.grammar_zero_accuracy[gra] += 1;
        }
    }
    Ok(HumanAggregation {
        axes: axes.to_vec(),
        strata: strata
            .into_iter()
            .map(|(key, histogram)| HumanStratum {
                labels: key.iter().map(|v| v.label(freq_edges)).collect(),
                key,
                histogram,
            })
            .collect(),
        unmatched,
        joined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Token, DEFAULT_FREQ_EDGES};
    use alloc::vec;

    fn tagged(words: &[(&str, &str)]) -> Sentence {
        Sentence::from_tokens(
            words
                .iter()
                .map(|(w, p)| {
                    let mut t = Token::word(*w);
                    t.upos = Some(String::from(*p));
                    t
                })
                .collect(),
        )
    }

    fn record(acc: u8) -> WordRecord {
        WordRecord {
            sentence: 0,
            token: 0,
            surface: String::from("x"),
            pos: String::from("NOUN"),
            morph_count: Some(1),
            fusion: None,
            train_freq: 0,
            in_vocab: false,
            accuracy: acc,
            aligned_hyp_surface: String::new(),
        }
    }

    #[test]
    fn exact_match_accuracy() {
        let r = tagged(&[("evler", "NOUN"), ("geldi", "VERB"), (".", "PUNCT")]);
        let h = Sentence::from_plain_line("evleri geldi .").unwrap();
        let a = SentenceAlignment::new(3, [(0, 0)]);
        let recs = word_accuracy(&r, &h, &a, &["NOUN", "VERB"], false);
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].accuracy, 0);
        assert_eq!(recs[0].aligned_hyp_surface, "evleri");
        assert_eq!(recs[1].accuracy, 0);
        assert_eq!(recs[1].aligned_hyp_surface, "");
        assert_eq!(recs[1].sentence, 3);

        let a = SentenceAlignment::new(0, [(0, 0), (1, 1)]);
        let h = Sentence::from_plain_line("evler geldi").unwrap();
        let recs = word_accuracy(&r, &h, &a, &["NOUN", "VERB"], false);
        assert!(recs.iter().all(|r| r.accuracy == 1));
    }

    #[test]
    fn any_linked_match_counts_and_casefold() {
        let r = tagged(&[("Evler", "NOUN")]);
        let h = Sentence::from_plain_line("bu evler").unwrap();
        let a = SentenceAlignment::new(0, [(0, 0), (0, 1)]);
        assert_eq!(word_accuracy(&r, &h, &a, &["NOUN"], false)[0].accuracy, 0);
        let rec = &word_accuracy(&r, &h, &a, &["NOUN"], true)[0];
        assert_eq!(rec.accuracy, 1);
        assert_eq!(rec.aligned_hyp_surface, "evler");
    }

    #[test]
    fn annotation_fills_fields() {
        let corpus = vec![Sentence::from_plain_line("evler evler ev").unwrap()];
        let freq = FrequencyTable::from_sentences(&corpus, false);
        let vocab: BTreeSet<String> = [String::from("evler")].into_iter().collect();
        let fusion: BTreeMap<(usize, usize), f64> = [((0, 0), 0.8)].into_iter().collect();
        let mut recs = vec![record(1), record(0)];
        recs[0].surface = String::from("evler");
        recs[1].surface = String::from("yok");
        recs[1].token = 1;
        annotate_records(
            &mut recs,
            &RecordAnnotations {
                freq_table: &freq,
                model_vocab: &vocab,
                segmenter: None,
                fusion: Some(&fusion),
            },
        );
        assert_eq!((recs[0].train_freq, recs[0].in_vocab, recs[0].fusion), (2, true, Some(0.8)));
        assert_eq!((recs[1].train_freq, recs[1].in_vocab, recs[1].fusion), (0, false, None));
    }

    #[test]
    fn suppression_below_min_samples() {
        let recs: Vec<WordRecord> = (0..29).map(|_| record(1)).collect();
        let t = stratify(&recs, &[Axis::MorphCount], 30, &DEFAULT_FREQ_EDGES).unwrap();
        assert_eq!(t.cells.len(), 1);
        assert!(t.cells[0].suppressed);
        assert_eq!(t.cells[0].n, 29);
        assert_eq!(t.cells[0].mean_accuracy, None);

        let recs: Vec<WordRecord> = (0..30).map(|_| record(1)).collect();
        let t = stratify(&recs, &[Axis::MorphCount], 30, &DEFAULT_FREQ_EDGES).unwrap();
        assert_eq!(t.cells[0].mean_accuracy, Some(1.0));
    }

    #[test]
    fn records_without_axis_value_are_excluded() {
        let mut recs = vec![record(1), record(0)];
        recs[0].fusion = Some(0.0);
        let t = stratify(&recs, &[Axis::FusionBinary], 1, &DEFAULT_FREQ_EDGES).unwrap();
        assert_eq!(t.excluded, 1);
        assert_eq!(t.cells[0].labels, vec![String::from("fusion=0")]);
    }

    #[test]
    fn human_scores() {
        assert!(HumanScore::new(0, 0, 5, 1).is_err());
        assert!(HumanScore::new(0, 0, 4, 0).is_err());
        let recs = vec![record(0)];
        let scores = vec![
            HumanScore::new(0, 0, 4, 3).unwrap(),
            HumanScore::new(9, 9, 1, 1).unwrap(),
        ];
        let agg = aggregate_human_scores(&scores, &recs, &[Axis::InVocab], &DEFAULT_FREQ_EDGES)
            .unwrap();
        assert_eq!(agg.joined, 1);
        assert_eq!(agg.unmatched, vec![(9, 9)]);
        let h = &agg.strata[0].histogram;
        assert_eq!(h.semantic, [0, 0, 0, 1]);
        assert_eq!(h.semantic_zero_accuracy, [0, 0, 0, 1]);
        assert_eq!(h.grammar_zero_accuracy, [0, 0, 1]);

        let empty = aggregate_human_scores(&[], &recs, &[Axis::InVocab], &DEFAULT_FREQ_EDGES)
            .unwrap();
        assert!(empty.strata.is_empty());
    }
}
