use std::collections::BTreeMap;

use morphtypo::formats::serialize_model;
use morphtypo_core::corpus::{GoldSegmentationLexicon, Sentence};
use morphtypo_core::seg_eval::{eval_grouped, AlignParams, Denominator};
use morphtypo_core::segmenters::{
    train_bpe, train_morfessor_traced, train_unigram_traced, MorfessorParams, Segmenter, SegmenterModel, UnigramModel,
    UnigramParams,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, Outcome};

const CONSONANTS: &[char] = &['b', 'd', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

fn syllable(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    s.push(*CONSONANTS.choose(rng).unwrap());
    s.push(*VOWELS.choose(rng).unwrap());
    s
}

/// 1,000 distinct CV-syllable word types with Zipf-like counts, laid out as
/// sentences of eight tokens.
fn synthetic_corpus() -> (Vec<String>, Vec<Sentence>) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut types = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    while types.len() < 1000 {
        let n = rng.random_range(1..=5);
        let w: String = (0..n).map(|_| syllable(&mut rng)).collect();
        if seen.insert(w.clone()) {
            types.push(w);
        }
    }
    let mut tokens = Vec::new();
    for (rank, w) in types.iter().enumerate() {
        let count = (200 / (rank + 1)).max(1);
        tokens.extend(std::iter::repeat_n(w.clone(), count));
    }
    tokens.shuffle(&mut rng);
    let corpus = tokens
        .chunks(8)
        .filter_map(|c| Sentence::from_plain_line(&c.join(" ")))
        .collect();
    (types, corpus)
}

fn train_all(corpus: &[Sentence]) -> Result<Vec<SegmenterModel>, String> {
    let bpe = train_bpe(corpus, 300).map_err(|e| e.to_string())?;
    let (uni, _) = train_unigram_traced(corpus, &UnigramParams::new(300)).map_err(|e| e.to_string())?;
    let (morf, _) = train_morfessor_traced(corpus, &MorfessorParams::default()).map_err(|e| e.to_string())?;
    Ok(vec![SegmenterModel::Bpe(bpe), SegmenterModel::Unigram(uni), SegmenterModel::Morfessor(morf)])
}

/// Highest-scoring split over all 2^(n-1) cut sets, using the model's piece
/// table and the documented floor for unknown single characters.
fn brute_viterbi(model: &UnigramModel, word: &str) -> f64 {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let min = model.pieces().values().copied().fold(f64::INFINITY, f64::min);
    let floor = if min.is_finite() { min - 10.0 } else { -100.0 };
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << (n - 1)) {
        let mut score = 0.0;
        let mut start = 0;
        let mut ok = true;
        for end in 1..=n {
            if end == n || mask & (1 << (end - 1)) != 0 {
                let piece: String = chars[start..end].iter().collect();
                match model.pieces().get(&piece) {
                    Some(&lp) => score += lp,
                    None if end - start == 1 => score += floor,
                    None => {
                        ok = false;
                        break;
                    }
                }
                start = end;
            }
        }
        if ok && score > best {
            best = score;
        }
    }
    best
}

pub fn invariants() -> Outcome {
    let (types, corpus) = synthetic_corpus();
    let models = train_all(&corpus)?;

    // (a) reconstruction on every type, plus a few unseen words
    let unseen = ["zzq", "bazooka", "x", "tatatatatatatata"];
    for m in &models {
        for w in types.iter().map(String::as_str).chain(unseen) {
            let pieces = m.segment(w).ok_or_else(|| format!("{}: no analysis for {w}", m.method()))?;
            ensure!(pieces.concat() == w, "{}: {w} segmented as {pieces:?}", m.method());
            ensure!(pieces.iter().all(|p| !p.is_empty()), "{}: empty piece in {w}", m.method());
        }
    }

    // (b) unigram EM likelihood within each piece set
    let (uni, trace) = train_unigram_traced(&corpus, &UnigramParams::new(300)).map_err(|e| e.to_string())?;
    ensure!(trace.phases.iter().any(|p| p.len() > 1), "no EM iterations recorded");
    for (k, phase) in trace.phases.iter().enumerate() {
        for w in phase.windows(2) {
            ensure!(w[1] >= w[0] - 1e-9, "phase {k}: log-likelihood fell {} -> {}", w[0], w[1]);
        }
    }

    // (c) Viterbi against brute force
    let mut checked = 0;
    for w in types.iter().chain(unseen.iter().map(|s| s.to_string()).collect::<Vec<_>>().iter()) {
        if w.chars().count() > 10 {
            continue;
        }
        let (pieces, score) = uni.viterbi(w);
        let best = brute_viterbi(&uni, w);
        ensure!((score - best).abs() < 1e-9, "{w}: viterbi {score} but best split scores {best}");
        let own = uni.segmentation_log_prob(&pieces);
        if let Some(own) = own {
            ensure!((own - score).abs() < 1e-9, "{w}: returned split scores {own}, reported {score}");
        }
        checked += 1;
    }
    ensure!(checked >= 500, "only {checked} words of length <= 10");

    // (d) Morfessor description length
    let (_, mtrace) = train_morfessor_traced(&corpus, &MorfessorParams::default()).map_err(|e| e.to_string())?;
    ensure!(mtrace.costs.len() >= 2, "no Morfessor passes recorded");
    for w in mtrace.costs.windows(2) {
        ensure!(w[1] <= w[0] + 1e-9, "description length rose {} -> {}", w[0], w[1]);
    }

    // (e) byte-identical retraining
    let again = train_all(&corpus)?;
    for (a, b) in models.iter().zip(&again) {
        let sa = serialize_model(a).map_err(|e| e.to_string())?;
        let sb = serialize_model(b).map_err(|e| e.to_string())?;
        ensure!(sa == sb, "{}: retrained model differs", a.method());
    }
    Ok(())
}

const SUFFIXES: [&str; 5] = ["ler", "dan", "imiz", "ta", "ki"];

/// Roots × suffixes, bare roots and rare unsegmented control words. Returns
/// the training corpus and the gold lexicon.
fn over_splitting_fixture() -> (Vec<Sentence>, GoldSegmentationLexicon) {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut roots = std::collections::BTreeSet::new();
    while roots.len() < 40 {
        roots.insert(format!("{}{}", syllable(&mut rng), syllable(&mut rng)));
    }
    let mut lex = GoldSegmentationLexicon::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in &roots {
        lex.insert(r, vec![r.clone()], &[]).unwrap();
        *counts.entry(r.clone()).or_default() += rng.random_range(3..8);
        for s in SUFFIXES {
            let w = format!("{r}{s}");
            lex.insert(&w, vec![r.clone(), s.to_string()], &[]).unwrap();
            *counts.entry(w).or_default() += rng.random_range(2..6);
        }
    }
    let mut controls = 0;
    while controls < 40 {
        let w: String = (0..rng.random_range(3..5)).map(|_| syllable(&mut rng)).collect();
        if counts.contains_key(&w) {
            continue;
        }
        lex.insert(&w, vec![w.clone()], &[]).unwrap();
        counts.insert(w, 1);
        controls += 1;
    }
    let mut tokens: Vec<String> = counts.iter().flat_map(|(w, &c)| std::iter::repeat_n(w.clone(), c)).collect();
    tokens.shuffle(&mut rng);
    let corpus = tokens
        .chunks(10)
        .filter_map(|c| Sentence::from_plain_line(&c.join(" ")))
        .collect();
    (corpus, lex)
}

pub fn over_splitting() -> Outcome {
    let (corpus, lex) = over_splitting_fixture();
    let bpe = train_bpe(&corpus, 120).map_err(|e| e.to_string())?;
    let (uni, _) = train_unigram_traced(&corpus, &UnigramParams::new(120)).map_err(|e| e.to_string())?;
    let models = [SegmenterModel::Bpe(bpe), SegmenterModel::Unigram(uni)];
    for m in &models {
        let r = eval_grouped(&lex, m, &AlignParams::default(), Denominator::Hyp);
        let acc = |label: &str| r.groups.iter().find(|g| g.group == label).and_then(|g| g.accuracy_count);
        let (one, two) = (acc("1"), acc("2"));
        let (Some(one), Some(two)) = (one, two) else {
            return Err(format!("{}: empty group 1 or 2", m.method()));
        };
        ensure!(one < two, "{}: group 1 accuracy {one:.3} not below group 2 {two:.3}", m.method());
    }
    Ok(())
}
