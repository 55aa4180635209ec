//! Sentence-level chrF and BLEU on a 0-100 scale.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub const CHRF_MAX_N: usize = 6;
pub const CHRF_BETA: f64 = 2.0;
pub const BLEU_MAX_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrfScore {
    pub value: f64,
    /// Set when both strings contain no non-whitespace characters.
    pub both_empty: bool,
}

fn ngram_counts<T: Ord + Clone>(items: &[T], n: usize) -> BTreeMap<&[T], u64> {
    let mut counts = BTreeMap::new();
    if n == 0 || items.len() < n {
        return counts;
    }
    for w in items.windows(n) {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
}

fn clipped_matches<T: Ord>(hyp: &BTreeMap<&[T], u64>, reference: &BTreeMap<&[T], u64>) -> u64 {
    hyp.iter()
        .map(|(g, &c)| c.min(reference.get(g).copied().unwrap_or(0)))
        .sum()
}

/// Character n-gram F-beta, averaged over n = 1..=max_n. Whitespace is
/// removed first. Orders for which neither string has an n-gram are left out
/// of the average, so identical short strings still score 100.
pub fn sentence_chrf(hyp: &str, reference: &str, max_n: usize, beta: f64) -> ChrfScore {
    let h: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
    let r: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    if h.is_empty() && r.is_empty() {
        return ChrfScore {
            value: 0.0,
            both_empty: true,
        };
    }
    let b2 = beta * beta;
    let (mut sum, mut orders) = (0.0, 0usize);
    for n in 1..=max_n {
        let hc = ngram_counts(&h, n);
        let rc = ngram_counts(&r, n);
        let (ht, rt): (u64, u64) = (hc.values().sum(), rc.values().sum());
        if ht == 0 && rt == 0 {
            continue;
        }
        orders += 1;
        let m = clipped_matches(&hc, &rc);
        if m == 0 {
            continue;
        }
        let p = m as f64 / ht as f64;
        let rec = m as f64 / rt as f64;
        sum += (1.0 + b2) * p * rec / (b2 * p + rec);
    }
    ChrfScore {
        value: 100.0 * sum / orders as f64,
        both_empty: false,
    }
}

/// Geometric mean of clipped n-gram precisions times the brevity penalty
/// `exp(1 - r/h)` (when h < r). Orders n >= 2 use add-one smoothing on both
/// matches and totals; unigram precision is unsmoothed.
pub fn sentence_bleu<S: AsRef<str>>(hyp: &[S], reference: &[S], max_n: usize) -> f64 {
    let h: Vec<&str> = hyp.iter().map(AsRef::as_ref).collect();
    let r: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    if h.is_empty() || max_n == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let hc = ngram_counts(&h, n);
        let rc = ngram_counts(&r, n);
        let m = clipped_matches(&hc, &rc) as f64;
        let total = hc.values().sum::<u64>() as f64;
        let p = if n == 1 {
            m / total
        } else {
            (m + 1.0) / (total + 1.0)
        };
        if p == 0.0 {
            return 0.0;
        }
        log_sum += libm::log(p);
    }
    let (hl, rl) = (h.len() as f64, r.len() as f64);
    let bp = if hl < rl { libm::exp(1.0 - rl / hl) } else { 1.0 };
    100.0 * bp * libm::exp(log_sum / max_n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chrf_identity_and_disjoint() {
        assert_eq!(sentence_chrf("la casa", "la casa", 6, 2.0).value, 100.0);
        assert_eq!(sentence_chrf("ab", "ab", 6, 2.0).value, 100.0);
        assert_eq!(sentence_chrf("abc", "xyz", 6, 2.0).value, 0.0);
        let e = sentence_chrf(" ", "", 6, 2.0);
        assert!(e.both_empty && e.value == 0.0);
        assert_eq!(sentence_chrf("", "abc", 6, 2.0).value, 0.0);
    }

    #[test]
    fn chrf_hand_computed() {
        // abcd vs abce, n = 1..3: matches 3/4, 2/3, 1/2 on both sides, so
        // P = R and F = P at every order.
        let v = sentence_chrf("abcd", "abce", 3, 2.0).value;
        let expected = 100.0 * (0.75 + 2.0 / 3.0 + 0.5) / 3.0;
        assert!((v - expected).abs() < 1e-9);
    }

    #[test]
    fn chrf_whitespace_is_ignored() {
        let a = sentence_chrf("  la casa ", "lacasa", 6, 2.0).value;
        assert_eq!(a, 100.0);
    }

    #[test]
    fn bleu_identity_and_brevity() {
        let s = ["the", "cat", "sat"];
        assert!((sentence_bleu(&s, &s, 4) - 100.0).abs() < 1e-12);
        let r = ["the", "cat", "sat", "down"];
        let expected = 100.0 * libm::exp(1.0 - 4.0 / 3.0);
        assert!((sentence_bleu(&s, &r, 4) - expected).abs() < 1e-9);
        let empty: [&str; 0] = [];
        assert_eq!(sentence_bleu(&empty, &r, 4), 0.0);
        assert_eq!(sentence_bleu(&["dog"], &r, 4), 0.0);
    }

    #[test]
    fn bleu_clips_repeated_words() {
        // unigram 2/4 clipped; bigrams (the the) x3 match once -> (1+1)/(3+1)
        let h = ["the", "the", "the", "the"];
        let r = ["the", "the", "cat", "sat"];
        let p = [0.5, 2.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0];
        let expected = 100.0 * libm::exp(p.iter().map(|x: &f64| libm::log(*x)).sum::<f64>() / 4.0);
        assert!((sentence_bleu(&h, &r, 4) - expected).abs() < 1e-9);
    }
}
