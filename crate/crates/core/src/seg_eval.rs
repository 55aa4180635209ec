//! Segmenter evaluation against gold segmentations: morpheme-count accuracy
//! and exact segmentation precision over a Needleman-Wunsch morpheme
//! alignment, grouped by the gold morpheme count.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::GoldSegmentationLexicon;
use crate::segmenters::Segmenter;

/// Scoring parameters for [`nw_align`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignParams {
    /// Score of a morpheme aligned against a gap.
    pub gap: f64,
}

impl Default for AlignParams {
    fn default() -> Self {
        AlignParams { gap: -0.5 }
    }
}

/// One alignment column; `None` is a gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub hyp: Option<String>,
    pub gold: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphAlignment {
    pub pairs: Vec<AlignedPair>,
    pub score: f64,
}

impl MorphAlignment {
    /// Number of columns pairing two identical morphemes.
    pub fn exact_matches(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| matches!((&p.hyp, &p.gold), (Some(h), Some(g)) if h == g))
            .count()
    }
}

/// Character-level Levenshtein distance.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - levenshtein / max(len)`: 1 for identical morphemes, 0 for entirely
/// different ones of equal length.
pub fn substitution_score(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

/// 1 iff both segmentations have the same number of morphemes.
pub fn accuracy_count(hyp: &[String], gold: &[String]) -> u8 {
    u8::from(hyp.len() == gold.len())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Move {
    Diag,
    Up,
    Left,
}

/// Global alignment of hypothesis and gold morpheme sequences maximizing the
/// summed substitution scores plus gap penalties. Ties prefer the diagonal
/// move, then "up" (a hypothesis morpheme against a gap).
pub fn nw_align(hyp: &[String], gold: &[String], params: &AlignParams) -> MorphAlignment {
    let (n, m) = (hyp.len(), gold.len());
    let mut score = vec![vec![0.0f64; m + 1]; n + 1];
    let mut moves = vec![vec![Move::Diag; m + 1]; n + 1];
    for i in 1..=n {
        score[i][0] = i as f64 * params.gap;
        moves[i][0] = Move::Up;
    }
    for j in 1..=m {
        score[0][j] = j as f64 * params.gap;
        moves[0][j] = Move::Left;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = score[i - 1][j - 1] + substitution_score(&hyp[i - 1], &gold[j - 1]);
            let up = score[i - 1][j] + params.gap;
            let left = score[i][j - 1] + params.gap;
            let (best, mv) = if diag >= up && diag >= left {
                (diag, Move::Diag)
            } else if up >= left {
                (up, Move::Up)
            } else {
                (left, Move::Left)
            };
            score[i][j] = best;
            moves[i][j] = mv;
        }
    }

    let mut pairs = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match moves[i][j] {
            Move::Diag => {
                pairs.push(AlignedPair {
                    hyp: Some(hyp[i - 1].clone()),
                    gold: Some(gold[j - 1].clone()),
                });
                i -= 1;
                j -= 1;
            }
            Move::Up => {
                pairs.push(AlignedPair {
                    hyp: Some(hyp[i - 1].clone()),
                    gold: None,
                });
                i -= 1;
            }
            Move::Left => {
                pairs.push(AlignedPair {
                    hyp: None,
                    gold: Some(gold[j - 1].clone()),
                });
                j -= 1;
            }
        }
    }
    pairs.reverse();
    MorphAlignment {
        pairs,
        score: score[n][m],
    }
}

/// Which length divides the exact-match count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// |hyp|: a true precision.
    #[default]
    Hyp,
    /// |gold|: recall-style.
    Gold,
}

/// Exactly matching aligned morphemes divided by |hyp| (or |gold|).
pub fn exact_segmentation_precision(
    hyp: &[String],
    gold: &[String],
    params: &AlignParams,
    denominator: Denominator,
) -> f64 {
    let denom = match denominator {
        Denominator::Hyp => hyp.len(),
        Denominator::Gold => gold.len(),
    };
    if denom == 0 {
        return 0.0;
    }
    if hyp.is_empty() || gold.is_empty() {
        return 0.0;
    }
    nw_align(hyp, gold, params).exact_matches() as f64 / denom as f64
}

/// Metrics for one gold-morpheme-count group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScore {
    /// "1", "2", "3" or "4+"
    pub group: String,
    pub n: usize,
    pub accuracy_count: Option<f64>,
    pub precision: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedEval {
    pub groups: Vec<GroupScore>,
    /// Gold words the segmenter could not analyse (excluded from groups).
    pub unsegmented: usize,
}

pub const GROUP_LABELS: [&str; 4] = ["1", "2", "3", "4+"];

/// Group index for a gold morpheme count: 1, 2, 3, or 4 and above.
pub fn group_of(gold_len: usize) -> usize {
    gold_len.clamp(1, 4) - 1
}

/// Scores `model` on every lexicon entry, grouped by gold morpheme count.
pub fn eval_grouped<S: Segmenter + ?Sized>(
    lexicon: &GoldSegmentationLexicon,
    model: &S,
    params: &AlignParams,
    denominator: Denominator,
) -> GroupedEval {
    let mut n = [0usize; 4];
    let mut acc = [0u64; 4];
    let mut prec = [0.0f64; 4];
    let mut unsegmented = 0;
    for (word, gold) in lexicon.iter() {
        let Some(hyp) = model.segment(word) else {
            unsegmented += 1;
            continue;
        };
        let g = group_of(gold.len());
        n[g] += 1;
        acc[g] += u64::from(accuracy_count(&hyp, gold));
        prec[g] += exact_segmentation_precision(&hyp, gold, params, denominator);
    }
    let groups = (0..4)
        .map(|g| GroupScore {
            group: String::from(GROUP_LABELS[g]),
            n: n[g],
            accuracy_count: (n[g] > 0).then(|| acc[g] as f64 / n[g] as f64),
            precision: (n[g] > 0).then(|| prec[g] / n[g] as f64),
        })
        .collect();
    GroupedEval {
        groups,
        unsegmented,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmenters::ExternalSegmentation;

    fn s(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| String::from(*x)).collect()
    }

    #[test]
    fn count_accuracy() {
        assert_eq!(accuracy_count(&s(&["walk", "ed"]), &s(&["walk", "ed"])), 1);
        assert_eq!(accuracy_count(&s(&["walked"]), &s(&["walk", "ed"])), 0);
        assert_eq!(accuracy_count(&s(&["wal", "ked"]), &s(&["walk", "ed"])), 1);
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("ed", "ed"), 0);
        assert_eq!(substitution_score("e", "ed"), 0.5);
    }

    #[test]
    fn identical_sequences_align_diagonally() {
        let x = s(&["un", "do", "ing"]);
        let a = nw_align(&x, &x, &AlignParams::default());
        assert_eq!(a.score, 3.0);
        assert!(a.pairs.iter().all(|p| p.hyp.is_some() && p.gold.is_some()));
    }

    #[test]
    fn one_gap() {
        // hand DP: (a,a) = 1 then (gap, b) = -0.5
        let a = nw_align(&s(&["a"]), &s(&["a", "b"]), &AlignParams::default());
        assert_eq!(a.score, 0.5);
        assert_eq!(
            a.pairs,
            vec![
                AlignedPair {
                    hyp: Some(String::from("a")),
                    gold: Some(String::from("a"))
                },
                AlignedPair {
                    hyp: None,
                    gold: Some(String::from("b"))
                },
            ]
        );
    }

    #[test]
    fn precision_examples() {
        let p = AlignParams::default();
        let gold = s(&["walk", "ed"]);
        assert_eq!(exact_segmentation_precision(&gold, &gold, &p, Denominator::Hyp), 1.0);
        assert_eq!(
            exact_segmentation_precision(&s(&["wal", "ked"]), &gold, &p, Denominator::Hyp),
            0.0
        );
        let hyp = s(&["walk", "e", "d"]);
        assert_eq!(
            exact_segmentation_precision(&hyp, &gold, &p, Denominator::Hyp),
            1.0 / 3.0
        );
        assert_eq!(
            exact_segmentation_precision(&hyp, &gold, &p, Denominator::Gold),
            0.5
        );
    }

    #[test]
    fn grouped_identity_and_counts() {
        let mut lex = GoldSegmentationLexicon::new();
        let mut ext = ExternalSegmentation::new("gold");
        for (w, ms) in [
            ("cat", &["cat"][..]),
            ("walked", &["walk", "ed"][..]),
            ("unlocked", &["un", "lock", "ed"][..]),
            ("unlockings", &["un", "lock", "ing", "s"][..]),
        ] {
            lex.insert(w, s(ms), &[]).unwrap();
            ext.insert(w, s(ms), &[]).unwrap();
        }
        let r = eval_grouped(&lex, &ext, &AlignParams::default(), Denominator::Hyp);
        assert_eq!(r.groups.len(), 4);
        for g in &r.groups {
            assert_eq!(g.n, 1);
            assert_eq!(g.accuracy_count, Some(1.0));
            assert_eq!(g.precision, Some(1.0));
        }

        let empty = ExternalSegmentation::new("none");
        let r = eval_grouped(&lex, &empty, &AlignParams::default(), Denominator::Hyp);
        assert_eq!(r.unsegmented, 4);
        assert!(r.groups.iter().all(|g| g.n == 0 && g.accuracy_count.is_none()));
    }
}
