use morphtypo_core::corpus::Sentence;
use morphtypo_core::indices::{fusion_word, word_joints, MorphFeatureProfile, MorphRecord};
use morphtypo_core::metrics::{sentence_bleu, sentence_chrf};
use morphtypo_core::seg_eval::{levenshtein, nw_align, substitution_score, AlignParams};
use morphtypo_core::segmenters::{train_bpe, train_unigram, Segmenter, UnigramParams};
use proptest::prelude::*;

fn morphs() -> impl Strategy<Value = Vec<(String, u32, bool)>> {
    prop::collection::vec(("[a-z]{1,4}", 0u32..6, any::<bool>()), 1..6)
}

proptest! {
    #[test]
    fn fusion_is_a_proper_fraction(mut parts in morphs()) {
        let rootless: Vec<MorphRecord> = parts.iter().map(|(m, f, _)| MorphRecord::new(m.clone(), *f, false)).collect();
        prop_assert!(MorphFeatureProfile::new(rootless).is_err());
        parts[0].2 = true;
        let records = parts.iter().map(|(m, f, r)| MorphRecord::new(m.clone(), *f, *r)).collect();
        let p = MorphFeatureProfile::new(records).unwrap();
        let t = word_joints(&p);
        prop_assert_eq!(t.explicit_boundaries, parts.len() as u64 - 1);
        let expected: u64 = parts.iter().map(|(_, f, r)| u64::from(f + u32::from(*r)).saturating_sub(1)).sum();
        prop_assert_eq!(t.fusional_joints, expected);
        let f = fusion_word(&p);
        if t.total() == 0 {
            prop_assert!(f.jointless);
        } else {
            prop_assert!((0.0..=1.0).contains(&f.value));
            prop_assert_eq!(f.value, t.fusional_joints as f64 / t.total() as f64);
        }
    }

    #[test]
    fn levenshtein_is_a_metric(a in "[abc]{0,6}", b in "[abc]{0,6}", c in "[abc]{0,6}") {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        let s = substitution_score(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn alignment_covers_both_sequences(
        hyp in prop::collection::vec("[a-d]{1,3}", 0..7),
        gold in prop::collection::vec("[a-d]{1,3}", 0..7),
        gap in -2.0f64..0.0,
    ) {
        let a = nw_align(&hyp, &gold, &AlignParams { gap });
        let h: Vec<String> = a.pairs.iter().filter_map(|p| p.hyp.clone()).collect();
        let g: Vec<String> = a.pairs.iter().filter_map(|p| p.gold.clone()).collect();
        prop_assert_eq!(h, hyp.clone());
        prop_assert_eq!(g, gold.clone());
        let sum: f64 = a.pairs.iter().map(|p| match (&p.hyp, &p.gold) {
            (Some(x), Some(y)) => substitution_score(x, y),
            _ => gap,
        }).sum();
        prop_assert!((sum - a.score).abs() < 1e-9);
        // never worse than pairing the common prefix and gapping the rest
        let k = hyp.len().min(gold.len());
        let naive: f64 = (0..k).map(|i| substitution_score(&hyp[i], &gold[i])).sum::<f64>()
            + gap * (hyp.len() + gold.len() - 2 * k) as f64;
        prop_assert!(a.score >= naive - 1e-9);
    }

    #[test]
    fn metrics_are_bounded(
        hyp in prop::collection::vec("[a-e]{1,4}", 1..12),
        reference in prop::collection::vec("[a-e]{1,4}", 1..12),
    ) {
        let b = sentence_bleu(&hyp, &reference, 4);
        prop_assert!((0.0..=100.0 + 1e-9).contains(&b));
        let c = sentence_chrf(&hyp.join(" "), &reference.join(" "), 6, 2.0).value;
        prop_assert!((0.0..=100.0 + 1e-9).contains(&c));
        prop_assert!((sentence_bleu(&hyp, &hyp, 4) - 100.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trained_segmenters_reconstruct(
        words in prop::collection::vec("[a-f]{1,8}", 5..40),
        probe in "[a-h]{1,10}",
        vocab in 8usize..60,
    ) {
        let corpus: Vec<Sentence> = words
            .chunks(5)
            .filter_map(|c| Sentence::from_plain_line(&c.join(" ")))
            .collect();
        let bpe = train_bpe(&corpus, vocab).unwrap();
        let uni = train_unigram(&corpus, &UnigramParams::new(vocab)).unwrap();
        for w in words.iter().chain(std::iter::once(&probe)) {
            prop_assert_eq!(bpe.segment(w).unwrap().concat(), w.clone());
            prop_assert_eq!(uni.segment(w).unwrap().concat(), w.clone());
        }
    }
}
