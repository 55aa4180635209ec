use std::collections::BTreeMap;

use morphtypo_core::corpus::{Sentence, Token};
use morphtypo_core::fusion_annotation::{project_fusion, AnnotationSet, OverrideTable, SheetRow};
use morphtypo_core::word_eval::{stratify, Axis, AxisValue, WordRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, Outcome};

const EDGES: [i64; 3] = [0, 10, 100];

fn record(i: usize, morph_count: Option<usize>, in_vocab: bool, fusion: Option<f64>, accuracy: u8) -> WordRecord {
    WordRecord {
        sentence: i,
        token: 0,
        surface: format!("w{i}"),
        pos: String::from("VERB"),
        morph_count,
        fusion,
        train_freq: 0,
        in_vocab,
        accuracy,
        aligned_hyp_surface: String::new(),
    }
}

fn suppression() -> Outcome {
    let mut records = Vec::new();
    for i in 0..29 {
        records.push(record(i, Some(1), true, None, (i % 2) as u8));
    }
    for i in 0..30 {
        records.push(record(100 + i, Some(2), true, None, (i % 3 == 0) as u8));
    }
    let t = stratify(&records, &[Axis::MorphCount], 30, &EDGES).map_err(|e| e.to_string())?;
    ensure!(t.cells.len() == 2, "{} cells", t.cells.len());
    let (small, big) = (&t.cells[0], &t.cells[1]);
    ensure!(small.n == 29 && small.suppressed && small.mean_accuracy.is_none(), "29-record cell not suppressed");
    ensure!(big.n == 30 && !big.suppressed, "30-record cell suppressed");
    ensure!(big.mean_accuracy == Some(10.0 / 30.0), "30-record mean {:?}", big.mean_accuracy);
    Ok(())
}

fn group_by_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let records: Vec<WordRecord> = (0..500)
        .map(|i| {
            let mc = rng.random_range(1..=5);
            record(i, Some(mc), rng.random_bool(0.7), None, u8::from(rng.random_bool(0.6)))
        })
        .collect();
    let mut oracle: BTreeMap<(usize, bool), (usize, usize)> = BTreeMap::new();
    for r in &records {
        let e = oracle.entry((r.morph_count.unwrap(), r.in_vocab)).or_default();
        e.0 += 1;
        e.1 += usize::from(r.accuracy);
    }
    let t = stratify(&records, &[Axis::MorphCount, Axis::InVocab], 1, &EDGES).map_err(|e| e.to_string())?;
    ensure!(t.cells.len() == oracle.len(), "{} cells, oracle has {}", t.cells.len(), oracle.len());
    ensure!(t.excluded == 0, "{} records excluded", t.excluded);
    for c in &t.cells {
        let (AxisValue::MorphCount(mc), AxisValue::InVocab(iv)) = (&c.key[0], &c.key[1]) else {
            return Err(format!("unexpected key {:?}", c.key));
        };
        let (n, correct) = oracle[&(*mc, *iv)];
        ensure!(c.n == n && c.correct == correct, "cell {:?}: {}/{} vs oracle {correct}/{n}", c.labels, c.correct, c.n);
        ensure!(c.mean_accuracy == Some(correct as f64 / n as f64), "cell {:?}: mean {:?}", c.labels, c.mean_accuracy);
    }
    Ok(())
}

const INF: &str = "VerbForm=Inf";
const GER: &str = "VerbForm=Ger";
const PRS_1PL: &str = "Mood=Ind|Number=Plur|Person=1|Tense=Pres|VerbForm=Fin";
const PST_3SG: &str = "Mood=Ind|Number=Sing|Person=3|Tense=Past|VerbForm=Fin";
const IMP_3SG: &str = "Mood=Ind|Number=Sing|Person=3|Tense=Imp|VerbForm=Fin";

fn verb(surface: &str, lemma: &str, feats: &str) -> Token {
    let mut t = Token::word(surface);
    t.lemma = Some(lemma.to_string());
    t.upos = Some(String::from("VERB"));
    t.feats = feats
        .split('|')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    t
}

fn row(features: &str, form: &str, seg: &str, counts: &str) -> SheetRow {
    SheetRow {
        paradigm_id: format!("P-{form}"),
        features: features.to_string(),
        termination: String::from("-ar"),
        sample_form: form.to_string(),
        segmentation: seg.to_string(),
        per_morph_features: counts.to_string(),
        ..SheetRow::default()
    }
}

/// Infinitives and gerunds carry one feature on a separate suffix, so their
/// fusion is 0; finite forms stack features and come out positive. The
/// imperfect is left unannotated.
fn fusion_partition() -> Outcome {
    let rows = [
        row(INF, "hablar", "habl-ar", "0,1"),
        row(GER, "hablando", "habl-ando", "0,1"),
        row(PRS_1PL, "hablamos", "habl-a-mos", "0,2,2"),
        row(PST_3SG, "habló", "habl-ó", "0,5"),
    ];
    let (set, rejected) = AnnotationSet::ingest(&rows).map_err(|e| e.to_string())?;
    ensure!(rejected.is_empty(), "rows rejected: {rejected:?}");

    let verbs = [
        ("cantar", "cantar", INF),
        ("cantando", "cantar", GER),
        ("cantamos", "cantar", PRS_1PL),
        ("cantó", "cantar", PST_3SG),
        ("cantaba", "cantar", IMP_3SG),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let mut corpus = Vec::new();
    let mut expected = [0usize; 5];
    for _ in 0..40 {
        let mut tokens = vec![Token::word("ellos")];
        for _ in 0..rng.random_range(1..4) {
            let k = rng.random_range(0..verbs.len());
            expected[k] += 1;
            let (s, l, f) = verbs[k];
            tokens.push(verb(s, l, f));
        }
        corpus.push(Sentence::from_tokens(tokens));
    }
    let projection = project_fusion(&corpus, &set, &OverrideTable::new(), &["VERB"]).map_err(|e| e.to_string())?;
    let total: usize = expected.iter().sum();
    ensure!(projection.verbs() == total, "{} verbs projected, {total} in corpus", projection.verbs());

    let assigned = projection.assignments();
    let records: Vec<WordRecord> = projection
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| record(i, None, true, assigned.get(&(t.sentence, t.token)).copied(), 1))
        .collect();
    let table = stratify(&records, &[Axis::FusionBinary], 1, &EDGES).map_err(|e| e.to_string())?;
    let count = |v: bool| {
        table
            .cells
            .iter()
            .find(|c| c.key == [AxisValue::Fusional(v)])
            .map_or(0, |c| c.n)
    };
    let (zero, positive) = (count(false), count(true));
    ensure!(zero == expected[0] + expected[1], "fusion=0 has {zero}, expected {}", expected[0] + expected[1]);
    ensure!(positive == expected[2] + expected[3], "fusion>0 has {positive}, expected {}", expected[2] + expected[3]);
    ensure!(table.excluded == expected[4], "{} excluded, expected {} uncovered", table.excluded, expected[4]);
    ensure!(zero + positive + table.excluded == total, "partition does not cover all verbs");
    let labels: Vec<&str> = table.cells.iter().map(|c| c.labels[0].as_str()).collect();
    ensure!(labels == ["fusion=0", "fusion>0"], "labels {labels:?}");
    Ok(())
}

pub fn stratification() -> Outcome {
    suppression()?;
    group_by_oracle()?;
    fusion_partition()
}
