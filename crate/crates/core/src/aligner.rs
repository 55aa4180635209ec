//! Reference/hypothesis word alignment with IBM Model 1.
//!
//! Two directional translation tables are trained by EM, each sentence is
//! aligned by per-word argmax in both directions, and the intersection of
//! the two link sets is kept.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Label used for the empty source word in exported tables.
pub const NULL_WORD: &str = "<NULL>";

/// `t(target | source)` with a separate distribution for the empty source.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TranslationTable {
    pub lowercase: bool,
    probs: BTreeMap<String, BTreeMap<String, f64>>,
    null: BTreeMap<String, f64>,
}

impl TranslationTable {
    pub fn prob(&self, source: &str, target: &str) -> f64 {
        let (s, t) = (self.norm(source), self.norm(target));
        self.probs
            .get(s.as_str())
            .and_then(|row| row.get(t.as_str()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn null_prob(&self, target: &str) -> f64 {
        self.null.get(self.norm(target).as_str()).copied().unwrap_or(0.0)
    }

    fn norm(&self, w: &str) -> String {
        if self.lowercase {
            w.to_lowercase()
        } else {
            String::from(w)
        }
    }

    /// Rows as `(source, target, prob)`; the empty source is [`NULL_WORD`].
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.null
            .iter()
            .map(|(t, p)| (NULL_WORD, t.as_str(), *p))
            .chain(self.probs.iter().flat_map(|(s, row)| {
                row.iter().map(move |(t, p)| (s.as_str(), t.as_str(), *p))
            }))
    }

    pub fn insert(&mut self, source: &str, target: &str, prob: f64) {
        if source == NULL_WORD {
            self.null.insert(String::from(target), prob);
        } else {
            self.probs
                .entry(String::from(source))
                .or_default()
                .insert(String::from(target), prob);
        }
    }

    /// Largest deviation of any source row from summing to one.
    pub fn max_normalization_error(&self) -> f64 {
        core::iter::once(&self.null)
            .chain(self.probs.values())
            .filter(|row| !row.is_empty())
            .map(|row| (row.values().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.probs.keys().map(String::as_str)
    }

    /// The most probable target for `source` (ties to the smallest target).
    pub fn best_target(&self, source: &str) -> Option<(&str, f64)> {
        self.probs.get(self.norm(source).as_str()).and_then(|row| {
            row.iter()
                .max_by(|a, b| a.1.total_cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map(|(t, p)| (t.as_str(), *p))
        })
    }
}

/// A reference/hypothesis pair of tokenized sentences.
pub type SentencePair = (Vec<String>, Vec<String>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ibm1Params {
    pub iterations: usize,
    pub lowercase: bool,
}

impl Default for Ibm1Params {
    fn default() -> Self {
        Ibm1Params {
            iterations: 5,
            lowercase: true,
        }
    }
}

/// Log-likelihood of the targets at each EM iteration (before its update).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ibm1Trace {
    pub log_likelihood: Vec<f64>,
}

pub fn train_ibm1(pairs: &[SentencePair], params: &Ibm1Params) -> Result<TranslationTable> {
    train_ibm1_traced(pairs, params).map(|(t, _)| t)
}

/// EM for `t(target | source)` where the first element of each pair is the
/// source side. Starts uniform over the target vocabulary.
pub fn train_ibm1_traced(
    pairs: &[SentencePair],
    params: &Ibm1Params,
) -> Result<(TranslationTable, Ibm1Trace)> {
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    // intern words to ids; id 0 of the source side is NULL
    let mut src_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut tgt_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut src_words: Vec<String> = alloc::vec![String::from(NULL_WORD)];
    let mut tgt_words: Vec<String> = Vec::new();
    let norm = |w: &String| {
        if params.lowercase {
            w.to_lowercase()
        } else {
            w.clone()
        }
    };
    let mut corpus: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(pairs.len());
    for (src, tgt) in pairs {
        let mut s = alloc::vec![0usize];
        for w in src {
            let w = norm(w);
            let id = *src_ids.entry(w.clone()).or_insert_with(|| {
                src_words.push(w);
                src_words.len() - 1
            });
            s.push(id);
        }
        let mut t = Vec::with_capacity(tgt.len());
        for w in tgt {
            let w = norm(w);
            let id = *tgt_ids.entry(w.clone()).or_insert_with(|| {
                tgt_words.push(w);
                tgt_words.len() - 1
            });
            t.push(id);
        }
        corpus.push((s, t));
    }
    if tgt_words.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let uniform = 1.0 / tgt_words.len() as f64;
    // sparse table over co-occurring (source, target) pairs
    let mut t: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (s, tg) in &corpus {
        for &e in s {
            for &f in tg {
                t.insert((e, f), uniform);
            }
        }
    }

    let mut trace = Ibm1Trace::default();
    for _ in 0..params.iterations {
        let mut counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut totals: BTreeMap<usize, f64> = BTreeMap::new();
        let mut loglik = 0.0;
        for (s, tg) in &corpus {
            let l = s.len() as f64;
            for &f in tg {
                let z: f64 = s.iter().map(|&e| t[&(e, f)]).sum();
                loglik += libm::log(z / l);
                for &e in s {
                    let c = t[&(e, f)] / z;
                    *counts.entry((e, f)).or_insert(0.0) += c;
                    *totals.entry(e).or_insert(0.0) += c;
                }
            }
        }
        trace.log_likelihood.push(loglik);
        for (&(e, f), c) in &counts {
            t.insert((e, f), c / totals[&e]);
        }
    }

    let mut table = TranslationTable {
        lowercase: params.lowercase,
        ..TranslationTable::default()
    };
    for (&(e, f), &p) in &t {
        table.insert(&src_words[e], &tgt_words[f], p);
    }
    Ok((table, trace))
}

/// Word links `(ref index, hyp index)` of one sentence pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceAlignment {
    pub sentence: usize,
    pub links: BTreeSet<(usize, usize)>,
}

impl SentenceAlignment {
    pub fn new(sentence: usize, links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        SentenceAlignment {
            sentence,
            links: links.into_iter().collect(),
        }
    }

    /// Checks every link against the sentence lengths.
    pub fn validate(&self, ref_len: usize, hyp_len: usize) -> Result<()> {
        match self.links.iter().find(|(r, h)| *r >= ref_len || *h >= hyp_len) {
            Some((r, h)) => Err(Error::OutOfRange(alloc::format!(
                "link {r}-{h} for sentence lengths {ref_len}/{hyp_len}"
            ))),
            None => Ok(()),
        }
    }

    pub fn hyp_for(&self, ref_index: usize) -> impl Iterator<Item = usize> + '_ {
        self.links
            .range((ref_index, 0)..(ref_index + 1, 0))
            .map(|&(_, h)| h)
    }
}

fn argmax_leftmost(scores: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in scores.enumerate() {
        if p > 0.0 && best.is_none_or(|(_, b)| p > b) {
            best = Some((i, p));
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AlignOptions {
    /// Grow the intersection towards the union along neighbouring links.
    pub grow_diag: bool,
}

/// Intersection of per-ref-word argmax links under `t_fwd(hyp | ref)` and
/// per-hyp-word argmax links under `t_rev(ref | hyp)`. Words whose best
/// probability is zero get no link; ties go to the leftmost position.
pub fn align_sentence(
    table_fwd: &TranslationTable,
    table_rev: &TranslationTable,
    sentence: usize,
    reference: &[String],
    hypothesis: &[String],
    options: AlignOptions,
) -> SentenceAlignment {
    let forward: BTreeSet<(usize, usize)> = reference
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            argmax_leftmost(hypothesis.iter().map(|h| table_fwd.prob(r, h))).map(|j| (i, j))
        })
        .collect();
    let reverse: BTreeSet<(usize, usize)> = hypothesis
        .iter()
        .enumerate()
        .filter_map(|(j, h)| {
            argmax_leftmost(reference.iter().map(|r| table_rev.prob(h, r))).map(|i| (i, j))
        })
        .collect();
    let mut links: BTreeSet<(usize, usize)> = forward.intersection(&reverse).copied().collect();
    if options.grow_diag {
        grow_diag(&mut links, &forward, &reverse);
    }
    SentenceAlignment { sentence, links }
}

/// Adds union links adjacent (including diagonally) to existing links when
/// one of their words is still unaligned, until nothing changes.
fn grow_diag(
    links: &mut BTreeSet<(usize, usize)>,
    forward: &BTreeSet<(usize, usize)>,
    reverse: &BTreeSet<(usize, usize)>,
) {
    let union: BTreeSet<(usize, usize)> = forward.union(reverse).copied().collect();
    loop {
        let ref_aligned: BTreeSet<usize> = links.iter().map(|l| l.0).collect();
        let hyp_aligned: BTreeSet<usize> = links.iter().map(|l| l.1).collect();
        let added = union.iter().copied().find(|&(i, j)| {
            !links.contains(&(i, j))
                && (!ref_aligned.contains(&i) || !hyp_aligned.contains(&j))
                && links.iter().any(|&(a, b)| a.abs_diff(i) <= 1 && b.abs_diff(j) <= 1)
        });
        match added {
            Some(l) => {
                links.insert(l);
            }
            None => break,
        }
    }
}
