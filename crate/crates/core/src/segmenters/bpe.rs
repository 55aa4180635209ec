use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{chars_of, word_counts, Segmenter, DEFAULT_MARKER};
use crate::corpus::Sentence;
use crate::{Error, Result};

/// Byte-pair-encoding merges learned over word types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "BpeData", into = "BpeData")]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    vocab: BTreeSet<String>,
    marker: String,
    ranks: BTreeMap<(String, String), usize>,
}

#[derive(Serialize, Deserialize)]
struct BpeData {
    marker: String,
    vocab: BTreeSet<String>,
    merges: Vec<(String, String)>,
}

impl From<BpeData> for BpeModel {
    fn from(d: BpeData) -> Self {
        BpeModel::from_parts(d.merges, d.vocab, d.marker)
    }
}

impl From<BpeModel> for BpeData {
    fn from(m: BpeModel) -> Self {
        BpeData {
            marker: m.marker,
            vocab: m.vocab,
            merges: m.merges,
        }
    }
}

impl BpeModel {
    pub fn from_parts(
        merges: Vec<(String, String)>,
        vocab: BTreeSet<String>,
        marker: String,
    ) -> Self {
        let ranks = merges
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        BpeModel {
            merges,
            vocab,
            marker,
            ranks,
        }
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    /// Applies merges to the character sequence of `word`, lowest rank first.
    pub fn apply(&self, word: &str) -> Vec<String> {
        let mut symbols = chars_of(word);
        loop {
            let best = symbols
                .windows(2)
                .enumerate()
                .filter_map(|(i, w)| {
                    self.ranks
                        .get(&(w[0].clone(), w[1].clone()))
                        .map(|&r| (r, i))
                })
                .min();
            let Some((rank, _)) = best else { break };
            let (left, right) = &self.merges[rank];
            symbols = merge_pair(&symbols, left, right);
        }
        symbols
    }
}

impl Segmenter for BpeModel {
    fn segment(&self, word: &str) -> Option<Vec<String>> {
        Some(self.apply(word))
    }
}

fn merge_pair(symbols: &[String], left: &str, right: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
            let mut merged = symbols[i].clone();
            merged.push_str(&symbols[i + 1]);
            out.push(merged);
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

/// Learns merges until the vocabulary reaches `vocab_size` symbols or no
/// pair occurs at least twice. The most frequent pair wins; ties go to the
/// lexicographically smallest `(left, right)`.
pub fn train_bpe(corpus: &[Sentence], vocab_size: usize) -> Result<BpeModel> {
    let counts = word_counts(corpus);
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    // symbols are interned; words are id sequences weighted by frequency
    let mut symbols: Vec<String> = Vec::new();
    let mut ids: BTreeMap<String, u32> = BTreeMap::new();
    let mut intern = |s: String, symbols: &mut Vec<String>| -> u32 {
        *ids.entry(s.clone()).or_insert_with(|| {
            symbols.push(s);
            (symbols.len() - 1) as u32
        })
    };

    let mut words: Vec<(Vec<u32>, u64)> = Vec::with_capacity(counts.len());
    for (word, &freq) in &counts {
        let seq = word
            .chars()
            .map(|c| intern(String::from(c), &mut symbols))
            .collect();
        words.push((seq, freq));
    }
    let alphabet = symbols.len();
    if vocab_size <= alphabet {
        return Err(Error::VocabTooSmall {
            requested: vocab_size,
            alphabet,
        });
    }

    let mut vocab: BTreeSet<String> = symbols.iter().cloned().collect();
    let mut merges: Vec<(String, String)> = Vec::new();
    let mut merged_pairs: BTreeSet<(u32, u32)> = BTreeSet::new();

    while vocab.len() < vocab_size {
        let mut pair_counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for (seq, freq) in &words {
            for w in seq.windows(2) {
                *pair_counts.entry((w[0], w[1])).or_insert(0) += freq;
            }
        }
        let best = pair_counts
            .iter()
            .filter(|(p, _)| !merged_pairs.contains(p))
            .max_by(|(pa, ca), (pb, cb)| {
                ca.cmp(cb).then_with(|| {
                    let a = (&symbols[pa.0 as usize], &symbols[pa.1 as usize]);
                    let b = (&symbols[pb.0 as usize], &symbols[pb.1 as usize]);
                    // smaller pair must compare as "greater" to win max_by
                    b.cmp(&a)
                })
            })
            .map(|(p, c)| (*p, *c));
        let Some(((left, right), count)) = best else {
            break;
        };
        if count < 2 {
            break;
        }

        let mut merged = symbols[left as usize].clone();
        merged.push_str(&symbols[right as usize]);
        let new_id = intern(merged.clone(), &mut symbols);
        for (seq, _) in words.iter_mut() {
            if seq.len() < 2 {
                continue;
            }
            let mut out = Vec::with_capacity(seq.len());
            let mut i = 0;
            while i < seq.len() {
                if i + 1 < seq.len() && seq[i] == left && seq[i + 1] == right {
                    out.push(new_id);
                    i += 2;
                } else {
                    out.push(seq[i]);
                    i += 1;
                }
            }
            *seq = out;
        }
        merged_pairs.insert((left, right));
        merges.push((
            symbols[left as usize].clone(),
            symbols[right as usize].clone(),
        ));
        vocab.insert(merged);
    }

    Ok(BpeModel::from_parts(
        merges,
        vocab,
        String::from(DEFAULT_MARKER),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn corpus(words: &[(&str, usize)]) -> Vec<Sentence> {
        let mut line = String::new();
        for (w, n) in words {
            for _ in 0..*n {
                line.push_str(w);
                line.push(' ');
            }
        }
        vec![Sentence::from_plain_line(&line).unwrap()]
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (String::from(a), String::from(b))
    }

    #[test]
    fn classic_corpus_first_merge() {
        // hand trace: (e,s) and (s,t) both occur 6 + 3 = 9 times; (w,e) 8;
        // (l,o) and (o,w) 7. The tie goes to the smaller pair (e,s).
        let c = corpus(&[("low", 5), ("lower", 2), ("newest", 6), ("widest", 3)]);
        let model = train_bpe(&c, 1000).unwrap();
        assert_eq!(model.merges()[0], pair("e", "s"));
        // after (e,s), (es,t) occurs 9 times and leads
        assert_eq!(model.merges()[1], pair("es", "t"));
    }

    #[test]
    fn repeated_single_word() {
        let c = corpus(&[("aaaa", 2)]);
        let model = train_bpe(&c, 10).unwrap();
        assert_eq!(model.merges(), &[pair("a", "a"), pair("aa", "aa")]);
        assert_eq!(model.apply("aaaa"), vec![String::from("aaaa")]);
    }

    #[test]
    fn single_occurrence_pairs_are_not_merged() {
        let c = corpus(&[("aaaa", 1)]);
        let model = train_bpe(&c, 10).unwrap();
        // (a,a) occurs three times in "aaaa", (aa,aa) only once
        assert_eq!(model.merges(), &[pair("a", "a")]);
    }

    #[test]
    fn vocab_must_exceed_alphabet() {
        let c = corpus(&[("abc", 3)]);
        assert!(matches!(
            train_bpe(&c, 3),
            Err(Error::VocabTooSmall { alphabet: 3, .. })
        ));
        assert_eq!(train_bpe(&[], 100), Err(Error::EmptyCorpus));
    }

    #[test]
    fn apply_uses_merge_order() {
        let vocab = ["e", "s", "t", "es", "est"]
            .iter()
            .map(|s| String::from(*s))
            .collect();
        let m = BpeModel::from_parts(
            vec![pair("e", "s"), pair("es", "t")],
            vocab,
            String::from("##"),
        );
        assert_eq!(m.apply("est"), vec![String::from("est")]);
        assert_eq!(m.apply("a"), vec![String::from("a")]);
        assert_eq!(
            m.apply("test"),
            vec![String::from("t"), String::from("est")]
        );
    }

    #[test]
    fn vocab_size_is_respected() {
        let c = corpus(&[("low", 5), ("lower", 2), ("newest", 6), ("widest", 3)]);
        let model = train_bpe(&c, 14).unwrap();
        assert_eq!(model.vocab().len(), 14, "{:?}", model.vocab());
        for w in ["low", "lower", "newest", "widest", "lowest"] {
            assert_eq!(model.apply(w).concat(), w, "{:?}", model.apply(w));
        }
    }
}
