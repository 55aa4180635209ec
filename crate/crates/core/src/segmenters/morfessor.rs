//! Morfessor Baseline: recursive binary splitting under a two-part
//! minimum-description-length cost.
//!
//! Total cost = corpus code length + lexicon code length, where
//!
//! * corpus: `N ln N - Σ c(m) ln c(m)` over morph tokens,
//! * lexicon: the characters of every morph type (plus an end marker) coded
//!   with the training character distribution, plus the frequency
//!   distribution code `ln C(N-1, M-1)` for `M` morph types.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{word_counts, Segmenter};
use crate::corpus::Sentence;
use crate::{Error, Result};

/// How raw word frequencies are turned into training counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dampening {
    /// Raw token counts.
    None,
    /// `round(log2(c + 1))`.
    Log,
    /// Every word type counts once.
    Ones,
}

impl Dampening {
    fn apply(self, count: u64) -> u64 {
        match self {
            Dampening::None => count,
            Dampening::Log => (libm::round(libm::log2(count as f64 + 1.0)) as u64).max(1),
            Dampening::Ones => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorfessorParams {
    pub dampening: Dampening,
    pub max_passes: usize,
}

impl Default for MorfessorParams {
    fn default() -> Self {
        MorfessorParams {
            dampening: Dampening::Ones,
            max_passes: 20,
        }
    }
}

/// Total description length before training and after each pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MorfessorTrace {
    pub costs: Vec<f64>,
}

const END_MARKER: char = '\u{0}';

/// Code lengths (nats) of the training characters and the end marker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CharCosts {
    costs: BTreeMap<char, f64>,
    /// cost for characters never seen in training
    unknown: f64,
}

impl CharCosts {
    fn from_words(words: &[(String, u64, u64)]) -> Self {
        let mut counts: BTreeMap<char, u64> = BTreeMap::new();
        for (w, _, c) in words {
            for ch in w.chars() {
                *counts.entry(ch).or_insert(0) += c;
            }
            *counts.entry(END_MARKER).or_insert(0) += c;
        }
        let total: u64 = counts.values().sum();
        let ln_total = libm::log(total as f64);
        let costs: BTreeMap<char, f64> = counts
            .into_iter()
            .map(|(ch, c)| (ch, ln_total - libm::log(c as f64)))
            .collect();
        // as if seen once more than never
        let unknown = libm::log(total as f64 + 1.0);
        CharCosts { costs, unknown }
    }

    fn string_cost(&self, s: &str) -> f64 {
        let body: f64 = s
            .chars()
            .map(|c| self.costs.get(&c).copied().unwrap_or(self.unknown))
            .sum();
        body + self.costs.get(&END_MARKER).copied().unwrap_or(self.unknown)
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    count: u64,
    /// byte offset of the binary split, if any
    split: Option<usize>,
}

/// Mutable cost model used while training.
struct CostModel {
    chars: CharCosts,
    nodes: BTreeMap<String, Node>,
    morphs: BTreeMap<String, u64>,
    tokens: u64,
    sum_c_ln_c: f64,
    lexicon_cost: f64,
}

fn c_ln_c(c: u64) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * libm::log(c)
    }
}

/// `ln C(n-1, m-1)`, the cost of coding `m` positive counts summing to `n`.
fn frequency_cost(n: u64, m: u64) -> f64 {
    if m == 0 || n == 0 {
        return 0.0;
    }
    let (n, m) = (n as f64, m as f64);
    libm::lgamma(n) - libm::lgamma(m) - libm::lgamma(n - m + 1.0)
}

/// Description length of a morph-count lexicon, computed from scratch.
fn description_length(chars: &CharCosts, morphs: &BTreeMap<String, u64>) -> f64 {
    let n: u64 = morphs.values().sum();
    let corpus = c_ln_c(n) - morphs.values().map(|&c| c_ln_c(c)).sum::<f64>();
    let lexicon: f64 = morphs.keys().map(|m| chars.string_cost(m)).sum();
    corpus + lexicon + frequency_cost(n, morphs.len() as u64)
}

impl CostModel {
    fn cost(&self) -> f64 {
        c_ln_c(self.tokens) - self.sum_c_ln_c
            + self.lexicon_cost
            + frequency_cost(self.tokens, self.morphs.len() as u64)
    }

    fn set_morph_count(&mut self, morph: &str, old: u64, new: u64) {
        self.sum_c_ln_c += c_ln_c(new) - c_ln_c(old);
        self.tokens = self.tokens + new - old;
        match (old, new) {
            (0, 0) => {}
            (0, _) => {
                self.lexicon_cost += self.chars.string_cost(morph);
                self.morphs.insert(String::from(morph), new);
            }
            (_, 0) => {
                self.lexicon_cost -= self.chars.string_cost(morph);
                self.morphs.remove(morph);
            }
            _ => {
                self.morphs.insert(String::from(morph), new);
            }
        }
    }

    /// Adds `delta` occurrences of `construction`, propagating through its
    /// stored split tree down to the leaf morphs.
    fn modify(&mut self, construction: &str, delta: i64) {
        let node = self
            .nodes
            .entry(String::from(construction))
            .or_insert(Node {
                count: 0,
                split: None,
            });
        let old = node.count;
        let new = (old as i64 + delta) as u64;
        node.count = new;
        match node.split {
            Some(at) => {
                self.modify(&construction[..at], delta);
                self.modify(&construction[at..], delta);
            }
            None => self.set_morph_count(construction, old, new),
        }
    }

    fn set_split(&mut self, construction: &str, split: Option<usize>) {
        if let Some(node) = self.nodes.get_mut(construction) {
            node.split = split;
        }
    }

    /// Re-analyses `construction`: keep it whole or split it in two, whichever
    /// codes shorter, then recurse into the halves. Splits must strictly
    /// improve on the unsplit analysis.
    fn optimize(&mut self, construction: &str) {
        let count = match self.nodes.get(construction) {
            Some(n) if n.count > 0 => n.count as i64,
            _ => return,
        };
        self.modify(construction, -count);

        self.set_split(construction, None);
        self.modify(construction, count);
        let unsplit = self.cost();
        self.modify(construction, -count);

        let mut best: Option<(f64, usize)> = None;
        for (at, _) in construction.char_indices().skip(1) {
            self.set_split(construction, Some(at));
            self.modify(construction, count);
            let c = self.cost();
            self.modify(construction, -count);
            if best.is_none_or(|(b, _)| c < b) {
                best = Some((c, at));
            }
        }

        match best {
            Some((c, at)) if c < unsplit => {
                self.set_split(construction, Some(at));
                self.modify(construction, count);
                self.optimize(&construction[..at]);
                self.optimize(&construction[at..]);
            }
            _ => {
                self.set_split(construction, None);
                self.modify(construction, count);
            }
        }
    }

    fn expand(&self, construction: &str, out: &mut Vec<String>) {
        match self.nodes.get(construction).and_then(|n| n.split) {
            Some(at) => {
                self.expand(&construction[..at], out);
                self.expand(&construction[at..], out);
            }
            None => out.push(String::from(construction)),
        }
    }
}

/// A trained Morfessor Baseline model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorfessorModel {
    params: MorfessorParams,
    char_costs: CharCosts,
    /// morph -> (dampened) count
    lexicon: BTreeMap<String, u64>,
    /// recursive analyses of the training word types
    analyses: BTreeMap<String, Vec<String>>,
}

impl MorfessorModel {
    pub fn lexicon(&self) -> &BTreeMap<String, u64> {
        &self.lexicon
    }

    pub fn params(&self) -> &MorfessorParams {
        &self.params
    }

    pub fn analysis(&self, word: &str) -> Option<&[String]> {
        self.analyses.get(word).map(Vec::as_slice)
    }

    /// Description length of the stored lexicon.
    pub fn description_length(&self) -> f64 {
        description_length(&self.char_costs, &self.lexicon)
    }

    /// Minimum-cost segmentation of an unseen word over the lexicon; unknown
    /// single characters are coded as new morphs.
    pub fn viterbi(&self, word: &str) -> Vec<String> {
        let chars: Vec<char> = word.chars().collect();
        let n = chars.len();
        let tokens = self.lexicon.values().sum::<u64>().max(1) as f64;
        let ln_n = libm::log(tokens);
        let max_len = self
            .lexicon
            .keys()
            .map(|m| m.chars().count())
            .max()
            .unwrap_or(1);
        // (cost, pieces, back)
        let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; n + 1];
        best[0] = Some((0.0, 0, 0));
        let mut buf = String::new();
        for end in 1..=n {
            for start in end.saturating_sub(max_len)..end {
                let Some((prev, pieces, _)) = best[start] else {
                    continue;
                };
                buf.clear();
                buf.extend(&chars[start..end]);
                let step = match self.lexicon.get(buf.as_str()) {
                    Some(&c) => ln_n - libm::log(c as f64),
                    None if end - start == 1 => ln_n + self.char_costs.string_cost(&buf),
                    None => continue,
                };
                let cand = (prev + step, pieces + 1, start);
                let better = match best[end] {
                    None => true,
                    Some((c, p, _)) => cand.0 < c || (cand.0 == c && cand.1 < p),
                };
                if better {
                    best[end] = Some(cand);
                }
            }
        }
        let mut out = Vec::new();
        let mut i = n;
        while i > 0 {
            let (_, _, back) = best[i].expect("single characters always reachable");
            out.push(chars[back..i].iter().collect());
            i = back;
        }
        out.reverse();
        out
    }
}

impl Segmenter for MorfessorModel {
    fn segment(&self, word: &str) -> Option<Vec<String>> {
        if word.is_empty() {
            return Some(Vec::new());
        }
        Some(match self.analyses.get(word) {
            Some(a) => a.clone(),
            None => self.viterbi(word),
        })
    }
}

pub fn train_morfessor(corpus: &[Sentence], params: &MorfessorParams) -> Result<MorfessorModel> {
    train_morfessor_traced(corpus, params).map(|(m, _)| m)
}

/// Trains from a corpus and records the description length per pass.
pub fn train_morfessor_traced(
    corpus: &[Sentence],
    params: &MorfessorParams,
) -> Result<(MorfessorModel, MorfessorTrace)> {
    train_from_counts(&word_counts(corpus), params)
}

/// Trains from word-type counts directly.
pub fn train_from_counts(
    counts: &BTreeMap<String, u64>,
    params: &MorfessorParams,
) -> Result<(MorfessorModel, MorfessorTrace)> {
    // (word, raw frequency, training count)
    let mut words: Vec<(String, u64, u64)> = counts
        .iter()
        .filter(|(w, &c)| !w.is_empty() && c > 0)
        .map(|(w, &c)| (w.clone(), c, params.dampening.apply(c)))
        .collect();
    if words.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut model = CostModel {
        chars: CharCosts::from_words(&words),
        nodes: BTreeMap::new(),
        morphs: BTreeMap::new(),
        tokens: 0,
        sum_c_ln_c: 0.0,
        lexicon_cost: 0.0,
    };
    for (w, _, c) in &words {
        model.modify(w, *c as i64);
    }

    let analyses = |m: &CostModel| -> Vec<Vec<String>> {
        words
            .iter()
            .map(|(w, _, _)| {
                let mut out = Vec::new();
                m.expand(w, &mut out);
                out
            })
            .collect()
    };

    let mut trace = MorfessorTrace {
        costs: vec![description_length(&model.chars, &model.morphs)],
    };
    let mut previous = analyses(&model);
    for _ in 0..params.max_passes {
        for (w, _, _) in &words {
            model.optimize(w);
        }
        trace
            .costs
            .push(description_length(&model.chars, &model.morphs));
        let current = analyses(&model);
        let changed = current != previous;
        previous = current;
        if !changed {
            break;
        }
    }

    let analyses = words
        .iter()
        .zip(previous)
        .map(|((w, _, _), a)| (w.clone(), a))
        .collect();
    Ok((
        MorfessorModel {
            params: *params,
            char_costs: model.chars,
            lexicon: model.morphs,
            analyses,
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(words: &[(&str, u64)]) -> BTreeMap<String, u64> {
        words.iter().map(|(w, c)| (String::from(*w), *c)).collect()
    }

    #[test]
    fn single_type_is_not_split() {
        let (m, trace) = train_from_counts(&counts(&[("walking", 50)]), &MorfessorParams::default())
            .unwrap();
        assert_eq!(m.segment("walking").unwrap(), vec![String::from("walking")]);
        assert_eq!(trace.costs.first(), trace.costs.last());
    }

    #[test]
    fn incremental_cost_matches_scratch_cost() {
        let words = [("walk", 50), ("walked", 50), ("walks", 50), ("talk", 50), ("talked", 50)];
        let (m, trace) =
            train_from_counts(&counts(&words), &MorfessorParams::default()).unwrap();
        assert!((m.description_length() - trace.costs.last().unwrap()).abs() < 1e-9);
        for w in trace.costs.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{:?}", trace.costs);
        }
    }

    #[test]
    fn unseen_words_reconstruct() {
        let words = [("walk", 5), ("walked", 3), ("talk", 4), ("talked", 2)];
        let (m, _) = train_from_counts(&counts(&words), &MorfessorParams::default()).unwrap();
        for w in ["walking", "stalk", "q", "dewalked"] {
            assert_eq!(m.segment(w).unwrap().concat(), w);
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            train_from_counts(&BTreeMap::new(), &MorfessorParams::default()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn dampening_rules() {
        assert_eq!(Dampening::None.apply(50), 50);
        assert_eq!(Dampening::Ones.apply(50), 1);
        assert_eq!(Dampening::Log.apply(1), 1);
        assert_eq!(Dampening::Log.apply(3), 2);
        assert_eq!(Dampening::Log.apply(50), 6);
    }
}
