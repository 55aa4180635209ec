//! Unigram language-model segmentation.
//!
//! Training follows the usual recipe: seed with frequent substrings, run EM
//! with forward-backward expected counts, then prune the pieces whose removal
//! costs the least likelihood, until the vocabulary fits.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{word_counts, Segmenter, DEFAULT_MARKER};
use crate::corpus::Sentence;
use crate::{Error, Result};

/// Longest seed substring, in characters.
pub const MAX_PIECE_CHARS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct UnigramParams {
    pub vocab_size: usize,
    pub seed_multiplier: f64,
    pub prune_fraction: f64,
    pub em_iterations: usize,
}

impl UnigramParams {
    pub fn new(vocab_size: usize) -> Self {
        UnigramParams {
            vocab_size,
            seed_multiplier: 4.0,
            prune_fraction: 0.2,
            em_iterations: 2,
        }
    }
}

/// Corpus log-likelihood at each EM step, one phase per piece set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UnigramTrace {
    pub phases: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnigramModel {
    marker: String,
    /// piece -> natural-log probability
    pieces: BTreeMap<String, f64>,
}

impl UnigramModel {
    pub fn from_log_probs(pieces: BTreeMap<String, f64>, marker: String) -> Self {
        UnigramModel { marker, pieces }
    }

    pub fn pieces(&self) -> &BTreeMap<String, f64> {
        &self.pieces
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    pub fn log_prob(&self, piece: &str) -> Option<f64> {
        self.pieces.get(piece).copied()
    }

    /// Log-probability of a given segmentation; `None` if any piece is
    /// outside the vocabulary.
    pub fn segmentation_log_prob(&self, morphs: &[String]) -> Option<f64> {
        morphs.iter().map(|m| self.log_prob(m)).sum()
    }

    /// Most probable segmentation and its log-probability. Ties prefer fewer
    /// pieces, then the lexicographically first piece sequence. Characters
    /// outside the vocabulary become single pieces with a penalty score.
    pub fn viterbi(&self, word: &str) -> (Vec<String>, f64) {
        let chars: Vec<char> = word.chars().collect();
        let floor = self.unknown_log_prob();
        viterbi_lattice(&chars, |s| match self.pieces.get(s) {
            Some(&lp) => Some(lp),
            None if s.chars().count() == 1 => Some(floor),
            None => None,
        })
    }

    fn unknown_log_prob(&self) -> f64 {
        let min = self
            .pieces
            .values()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            min - 10.0
        } else {
            -100.0
        }
    }
}

impl Segmenter for UnigramModel {
    fn segment(&self, word: &str) -> Option<Vec<String>> {
        Some(self.viterbi(word).0)
    }
}

#[derive(Clone, Copy)]
struct Cell {
    score: f64,
    pieces: usize,
    back: usize,
}

fn reconstruct(chars: &[char], cells: &[Option<Cell>], end: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = end;
    while i > 0 {
        let c = cells[i].expect("reachable");
        out.push(chars[c.back..i].iter().collect());
        i = c.back;
    }
    out.reverse();
    out
}

/// Viterbi over all substrings scored by `score`.
fn viterbi_lattice(chars: &[char], score: impl Fn(&str) -> Option<f64>) -> (Vec<String>, f64) {
    let n = chars.len();
    let mut cells: Vec<Option<Cell>> = vec![None; n + 1];
    cells[0] = Some(Cell {
        score: 0.0,
        pieces: 0,
        back: 0,
    });
    let mut buf = String::new();
    for end in 1..=n {
        for start in 0..end {
            let Some(prev) = cells[start] else { continue };
            buf.clear();
            buf.extend(&chars[start..end]);
            let Some(lp) = score(&buf) else { continue };
            let cand = Cell {
                score: prev.score + lp,
                pieces: prev.pieces + 1,
                back: start,
            };
            let better = match cells[end] {
                None => true,
                Some(cur) => match cand.score.partial_cmp(&cur.score) {
                    Some(Ordering::Greater) => true,
                    Some(Ordering::Less) | None => false,
                    Some(Ordering::Equal) => match cand.pieces.cmp(&cur.pieces) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            let mut a = reconstruct(chars, &cells, start);
                            a.push(buf.clone());
                            let b = reconstruct(chars, &cells, end);
                            a < b
                        }
                    },
                },
            };
            if better {
                cells[end] = Some(cand);
            }
        }
    }
    match cells[n] {
        Some(c) => (reconstruct(chars, &cells, n), c.score),
        None => (Vec::new(), f64::NEG_INFINITY),
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + libm::log(libm::exp(a - m) + libm::exp(b - m))
}

/// Training state: word types plus the current piece probabilities.
struct Trainer {
    words: Vec<(Vec<char>, f64)>,
    pieces: BTreeMap<String, f64>,
    chars: BTreeSet<String>,
    max_len: usize,
}

impl Trainer {
    /// One EM iteration; returns the corpus log-likelihood under the
    /// parameters in force before the update.
    #[allow(clippy::needless_range_loop)] // lattice positions index alpha and beta together
    fn em_step(&mut self) -> f64 {
        let mut expected: BTreeMap<String, f64> = BTreeMap::new();
        let mut loglik = 0.0;
        let mut buf = String::new();
        for (chars, freq) in &self.words {
            let n = chars.len();
            let lp = |s: usize, e: usize, buf: &mut String| -> Option<f64> {
                buf.clear();
                buf.extend(&chars[s..e]);
                self.pieces.get(buf.as_str()).copied()
            };
            let mut alpha = vec![f64::NEG_INFINITY; n + 1];
            alpha[0] = 0.0;
            for e in 1..=n {
                for s in e.saturating_sub(self.max_len)..e {
                    if let Some(p) = lp(s, e, &mut buf) {
                        alpha[e] = log_sum_exp(alpha[e], alpha[s] + p);
                    }
                }
            }
            let mut beta = vec![f64::NEG_INFINITY; n + 1];
            beta[n] = 0.0;
            for s in (0..n).rev() {
                for e in (s + 1)..=(s + self.max_len).min(n) {
                    if let Some(p) = lp(s, e, &mut buf) {
                        beta[s] = log_sum_exp(beta[s], p + beta[e]);
                    }
                }
            }
            let z = alpha[n];
            loglik += freq * z;
            for s in 0..n {
                for e in (s + 1)..=(s + self.max_len).min(n) {
                    if let Some(p) = lp(s, e, &mut buf) {
                        let post = libm::exp(alpha[s] + p + beta[e] - z);
                        if post > 0.0 {
                            *expected.entry(buf.clone()).or_insert(0.0) += freq * post;
                        }
                    }
                }
            }
        }
        // single characters stay in the vocabulary even if they vanish
        for c in &self.chars {
            let e = expected.entry(c.clone()).or_insert(0.0);
            if *e <= 0.0 {
                *e = 1e-12;
            }
        }
        let total: f64 = expected.values().sum();
        let log_total = libm::log(total);
        self.pieces = expected
            .into_iter()
            .map(|(p, c)| (p, libm::log(c) - log_total))
            .collect();
        loglik
    }

    fn viterbi(&self, chars: &[char], exclude: Option<&str>) -> (Vec<String>, f64) {
        viterbi_lattice(chars, |s| {
            if exclude == Some(s) || s.chars().count() > self.max_len {
                return None;
            }
            self.pieces.get(s).copied()
        })
    }

    /// Removes up to `count` non-character pieces with the smallest loss.
    fn prune(&mut self, count: usize) {
        let mut viterbi_freq: BTreeMap<String, f64> = BTreeMap::new();
        for (chars, freq) in &self.words {
            for piece in self.viterbi(chars, None).0 {
                *viterbi_freq.entry(piece).or_insert(0.0) += freq;
            }
        }
        let mut losses: Vec<(f64, String)> = self
            .pieces
            .iter()
            .filter(|(p, _)| !self.chars.contains(*p))
            .map(|(p, &lp)| {
                let f = viterbi_freq.get(p).copied().unwrap_or(0.0);
                let loss = if f == 0.0 {
                    0.0
                } else {
                    let chars: Vec<char> = p.chars().collect();
                    let (_, alt) = self.viterbi(&chars, Some(p));
                    f * (lp - alt)
                };
                (loss, p.clone())
            })
            .collect();
        losses.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for (_, piece) in losses.into_iter().take(count) {
            self.pieces.remove(&piece);
        }
        // renormalise the survivors
        let norm = self
            .pieces
            .values()
            .fold(f64::NEG_INFINITY, |acc, &lp| log_sum_exp(acc, lp));
        for lp in self.pieces.values_mut() {
            *lp -= norm;
        }
    }
}

pub fn train_unigram(corpus: &[Sentence], params: &UnigramParams) -> Result<UnigramModel> {
    train_unigram_traced(corpus, params).map(|(m, _)| m)
}

/// Trains a unigram model and also returns the EM log-likelihood trace.
pub fn train_unigram_traced(
    corpus: &[Sentence],
    params: &UnigramParams,
) -> Result<(UnigramModel, UnigramTrace)> {
    let counts = word_counts(corpus);
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if !(0.0..1.0).contains(&params.prune_fraction) || params.seed_multiplier <= 0.0 {
        return Err(Error::InvalidArgument(String::from(
            "prune_fraction must lie in [0, 1) and seed_multiplier be positive",
        )));
    }

    let mut char_counts: BTreeMap<String, f64> = BTreeMap::new();
    let mut substr_counts: BTreeMap<String, f64> = BTreeMap::new();
    let mut words = Vec::with_capacity(counts.len());
    for (word, &freq) in &counts {
        let chars: Vec<char> = word.chars().collect();
        let f = freq as f64;
        for c in &chars {
            *char_counts.entry(String::from(*c)).or_insert(0.0) += f;
        }
        for s in 0..chars.len() {
            for e in (s + 2)..=(s + MAX_PIECE_CHARS).min(chars.len()) {
                let sub: String = chars[s..e].iter().collect();
                *substr_counts.entry(sub).or_insert(0.0) += f;
            }
        }
        words.push((chars, f));
    }
    let alphabet = char_counts.len();
    if params.vocab_size <= alphabet {
        return Err(Error::VocabTooSmall {
            requested: params.vocab_size,
            alphabet,
        });
    }

    let seed_size = libm::ceil(params.seed_multiplier * params.vocab_size as f64) as usize;
    let mut ranked: Vec<(String, f64)> = substr_counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(seed_size);

    let chars: BTreeSet<String> = char_counts.keys().cloned().collect();
    let mut seed: BTreeMap<String, f64> = char_counts;
    seed.extend(ranked);
    let total: f64 = seed.values().sum();
    let log_total = libm::log(total);
    let pieces = seed
        .into_iter()
        .map(|(p, c)| (p, libm::log(c) - log_total))
        .collect();

    let mut trainer = Trainer {
        words,
        pieces,
        chars,
        max_len: MAX_PIECE_CHARS,
    };
    let mut trace = UnigramTrace::default();
    loop {
        let phase = (0..params.em_iterations)
            .map(|_| trainer.em_step())
            .collect();
        trace.phases.push(phase);
        let size = trainer.pieces.len();
        if size <= params.vocab_size {
            break;
        }
        let removable = size - trainer.chars.len();
        let wanted = libm::ceil(params.prune_fraction * size as f64) as usize;
        let count = wanted.max(1).min(size - params.vocab_size).min(removable);
        if count == 0 {
            break;
        }
        trainer.prune(count);
    }

    Ok((
        UnigramModel {
            marker: String::from(DEFAULT_MARKER),
            pieces: trainer.pieces,
        },
        trace,
    ))
}
