//! Writes the bundled toy corpus: a Spanish-like fusional target language,
//! an English-like source, two noisy MT systems, segmenter training text,
//! gold segmentations, a filled verb annotation sheet and human scores.
//!
//! cargo run -p morphtypo --example make_fixture -- crates/morphtypo/tests/fixtures/toy

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morphtypo::formats::{render_conllu, render_segmentations, write_annotation_sheet, write_file};
use morphtypo_core::corpus::{FeatureSet, Sentence, Token};
use morphtypo_core::fusion_annotation::{extract_unique_paradigms, sheet_rows, DEFAULT_VERB_POS};

const SENTENCES: usize = 200;
const TRAIN_SENTENCES: usize = 3000;

struct Verb {
    stem: &'static str,
    class: &'static str,
    en: &'static str,
    en_past: &'static str,
    en_3sg: &'static str,
}

const VERBS: &[Verb] = &[
    Verb { stem: "habl", class: "ar", en: "speak", en_past: "spoke", en_3sg: "speaks" },
    Verb { stem: "cant", class: "ar", en: "sing", en_past: "sang", en_3sg: "sings" },
    Verb { stem: "mir", class: "ar", en: "watch", en_past: "watched", en_3sg: "watches" },
    Verb { stem: "tom", class: "ar", en: "take", en_past: "took", en_3sg: "takes" },
    Verb { stem: "llev", class: "ar", en: "carry", en_past: "carried", en_3sg: "carries" },
    Verb { stem: "compr", class: "ar", en: "buy", en_past: "bought", en_3sg: "buys" },
    Verb { stem: "com", class: "er", en: "eat", en_past: "ate", en_3sg: "eats" },
    Verb { stem: "beb", class: "er", en: "drink", en_past: "drank", en_3sg: "drinks" },
    Verb { stem: "vend", class: "er", en: "sell", en_past: "sold", en_3sg: "sells" },
    Verb { stem: "aprend", class: "er", en: "learn", en_past: "learned", en_3sg: "learns" },
    Verb { stem: "viv", class: "ir", en: "live", en_past: "lived", en_3sg: "lives" },
    Verb { stem: "escrib", class: "ir", en: "write", en_past: "wrote", en_3sg: "writes" },
    Verb { stem: "abr", class: "ir", en: "open", en_past: "opened", en_3sg: "opens" },
    Verb { stem: "sub", class: "ir", en: "climb", en_past: "climbed", en_3sg: "climbs" },
];

struct Noun {
    sg: &'static str,
    pl_suffix: &'static str,
    fem: bool,
    en: &'static str,
    en_pl: &'static str,
}

const NOUNS: &[Noun] = &[
    Noun { sg: "casa", pl_suffix: "s", fem: true, en: "house", en_pl: "houses" },
    Noun { sg: "libro", pl_suffix: "s", fem: false, en: "book", en_pl: "books" },
    Noun { sg: "perro", pl_suffix: "s", fem: false, en: "dog", en_pl: "dogs" },
    Noun { sg: "gato", pl_suffix: "s", fem: false, en: "cat", en_pl: "cats" },
    Noun { sg: "mesa", pl_suffix: "s", fem: true, en: "table", en_pl: "tables" },
    Noun { sg: "carta", pl_suffix: "s", fem: true, en: "letter", en_pl: "letters" },
    Noun { sg: "ciudad", pl_suffix: "es", fem: true, en: "city", en_pl: "cities" },
    Noun { sg: "árbol", pl_suffix: "es", fem: false, en: "tree", en_pl: "trees" },
    Noun { sg: "coche", pl_suffix: "s", fem: false, en: "car", en_pl: "cars" },
    Noun { sg: "niño", pl_suffix: "s", fem: false, en: "boy", en_pl: "boys" },
    Noun { sg: "manzana", pl_suffix: "s", fem: true, en: "apple", en_pl: "apples" },
    Noun { sg: "canción", pl_suffix: "es", fem: true, en: "song", en_pl: "songs" },
];

/// (stem, gender-inflected, english). Uninflected adjectives have no
/// gender vowel.
const ADJECTIVES: &[(&str, bool, &str)] = &[
    ("nuev", true, "new"),
    ("roj", true, "red"),
    ("pequeñ", true, "small"),
    ("viej", true, "old"),
    ("grande", false, "big"),
    ("alegre", false, "happy"),
];

const ADPOSITIONS: &[(&str, &str)] = &[("en", "in"), ("con", "with"), ("para", "for"), ("sin", "without")];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tense {
    Pres,
    Past,
    Fut,
}

/// Persons as (person, plural).
const PERSONS: &[(u8, bool)] = &[(1, false), (2, false), (3, false), (1, true), (3, true)];

fn person_index(person: u8, plural: bool) -> usize {
    PERSONS.iter().position(|&p| p == (person, plural)).unwrap_or(2)
}

/// Morphs and per-morph feature counts of a finite verb form.
fn conjugate(v: &Verb, tense: Tense, person: u8, plural: bool) -> (Vec<String>, Vec<u32>) {
    let k = person_index(person, plural);
    let vowel = &v.class[..1];
    let s = |x: &str| x.to_owned();
    match tense {
        Tense::Pres => {
            let endings: [&str; 5] = match v.class {
                "ar" => ["o", "as", "a", "amos", "an"],
                "er" => ["o", "es", "e", "emos", "en"],
                _ => ["o", "es", "e", "imos", "en"],
            };
            if k == 3 {
                (vec![s(v.stem), s(vowel), s("mos")], vec![0, 2, 2])
            } else {
                (vec![s(v.stem), s(endings[k])], vec![0, 4])
            }
        }
        Tense::Past => {
            let endings: [&str; 5] = match v.class {
                "ar" => ["é", "aste", "ó", "amos", "aron"],
                _ => ["í", "iste", "ió", "imos", "ieron"],
            };
            (vec![s(v.stem), s(endings[k])], vec![0, 5])
        }
        Tense::Fut => {
            let endings = ["é", "ás", "á", "emos", "án"];
            (vec![s(v.stem), s(v.class), s(endings[k])], vec![0, 2, 2])
        }
    }
}

fn verb_feats(tense: Tense, person: u8, plural: bool) -> FeatureSet {
    feats(&[
        ("Mood", "Ind"),
        ("Number", if plural { "Plur" } else { "Sing" }),
        ("Person", ["1", "2", "3"][usize::from(person - 1)]),
        (
            "Tense",
            match tense {
                Tense::Pres => "Pres",
                Tense::Past => "Past",
                Tense::Fut => "Fut",
            },
        ),
        ("VerbForm", "Fin"),
    ])
}

fn feats(pairs: &[(&str, &str)]) -> FeatureSet {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn gender_number(fem: bool, plural: bool) -> FeatureSet {
    feats(&[
        ("Gender", if fem { "Fem" } else { "Masc" }),
        ("Number", if plural { "Plur" } else { "Sing" }),
    ])
}

fn token(surface: &str, lemma: &str, upos: &str, feats: FeatureSet) -> Token {
    Token {
        surface: surface.to_owned(),
        lemma: Some(lemma.to_owned()),
        upos: Some(upos.to_owned()),
        feats,
    }
}

fn noun_morphs(n: &Noun, plural: bool) -> Vec<String> {
    let mut m = vec![n.sg.to_owned()];
    if plural {
        m.push(n.pl_suffix.to_owned());
    }
    m
}

fn adj_morphs(a: &(&str, bool, &str), fem: bool, plural: bool) -> Vec<String> {
    let mut m = vec![a.0.to_owned()];
    if a.1 {
        m.push(String::from(if fem { "a" } else { "o" }));
    }
    if plural {
        m.push(String::from("s"));
    }
    m
}

fn article(definite: bool, fem: bool, plural: bool) -> (&'static str, &'static str) {
    match (definite, fem, plural) {
        (true, false, false) => ("el", "el"),
        (true, true, false) => ("la", "el"),
        (true, false, true) => ("los", "el"),
        (true, true, true) => ("las", "el"),
        (false, false, false) => ("un", "uno"),
        (false, true, false) => ("una", "uno"),
        (false, false, true) => ("unos", "uno"),
        (false, true, true) => ("unas", "uno"),
    }
}

/// What a target token is, so systems can corrupt it consistently.
#[derive(Clone)]
enum Slot {
    Verb { verb: usize, tense: Tense, person: u8, plural: bool },
    Noun { noun: usize, plural: bool },
    Adj { adj: usize, fem: bool, plural: bool },
    Other,
}

struct Generated {
    target: Sentence,
    slots: Vec<Slot>,
    source: Sentence,
}

/// Gold segmentations of every inflected form the grammar can produce.
fn gold_lexicon() -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for v in VERBS {
        for tense in [Tense::Pres, Tense::Past, Tense::Fut] {
            for &(p, pl) in PERSONS {
                let (m, _) = conjugate(v, tense, p, pl);
                out.insert(m.concat(), m);
            }
        }
    }
    for n in NOUNS {
        for pl in [false, true] {
            let m = noun_morphs(n, pl);
            out.insert(m.concat(), m);
        }
    }
    for a in ADJECTIVES {
        for fem in [false, true] {
            for pl in [false, true] {
                let m = adj_morphs(a, fem, pl);
                out.insert(m.concat(), m);
            }
        }
    }
    for w in ["el", "la", "un", "una", "en", "con", "para", "sin", "y", "hoy", "ayer", "mañana", "siempre", "yo", "tú", "él", "ella"] {
        out.insert(w.to_owned(), vec![w.to_owned()]);
    }
    out
}

fn noun_phrase<R: Rng>(
    rng: &mut R,
    tgt: &mut Vec<(Token, Slot)>,
    src: &mut Vec<String>,
    plural: Option<bool>,
) -> bool {
    let ni = rng.random_range(0..NOUNS.len());
    let n = &NOUNS[ni];
    let plural = plural.unwrap_or_else(|| rng.random_bool(0.35));
    let definite = rng.random_bool(0.6);
    let (det, det_lemma) = article(definite, n.fem, plural);
    let mut det_feats = gender_number(n.fem, plural);
    det_feats.insert("Definite".into(), if definite { "Def" } else { "Ind" }.into());
    det_feats.insert("PronType".into(), "Art".into());
    tgt.push((token(det, det_lemma, "DET", det_feats), Slot::Other));
    src.push(String::from(match (definite, plural) {
        (true, _) => "the",
        (false, false) => "a",
        (false, true) => "some",
    }));
    let surface = noun_morphs(n, plural).concat();
    tgt.push((token(&surface, n.sg, "NOUN", gender_number(n.fem, plural)), Slot::Noun { noun: ni, plural }));
    if rng.random_bool(0.4) {
        let ai = rng.random_range(0..ADJECTIVES.len());
        let a = &ADJECTIVES[ai];
        let lemma = adj_morphs(a, false, false).concat();
        let s = adj_morphs(a, n.fem, plural).concat();
        tgt.push((token(&s, &lemma, "ADJ", gender_number(n.fem, plural)), Slot::Adj { adj: ai, fem: n.fem, plural }));
        src.push(a.2.to_owned());
    }
    src.push(if plural { n.en_pl } else { n.en }.to_owned());
    plural
}

fn sentence<R: Rng>(rng: &mut R) -> Generated {
    let mut tgt: Vec<(Token, Slot)> = Vec::new();
    let mut src: Vec<String> = Vec::new();
    let tense = *[Tense::Pres, Tense::Past, Tense::Fut].choose(rng).unwrap_or(&Tense::Pres);
    let (person, plural) = if rng.random_bool(0.55) {
        let pl = noun_phrase(rng, &mut tgt, &mut src, None);
        (3, pl)
    } else {
        let (p, pl) = *PERSONS.choose(rng).unwrap_or(&(3, false));
        let fem = rng.random_bool(0.5);
        let (es, en) = match (p, pl) {
            (1, false) => ("yo", "I"),
            (2, false) => ("tú", "you"),
            (3, false) if fem => ("ella", "she"),
            (3, false) => ("él", "he"),
            (1, true) => ("nosotros", "we"),
            _ => ("ellos", "they"),
        };
        src.push(en.to_owned());
        // pro-drop
        if rng.random_bool(0.5) {
            let pf = feats(&[
                ("Number", if pl { "Plur" } else { "Sing" }),
                ("Person", ["1", "2", "3"][usize::from(p - 1)]),
                ("PronType", "Prs"),
            ]);
            tgt.push((token(es, es, "PRON", pf), Slot::Other));
        }
        (p, pl)
    };
    let vi = rng.random_range(0..VERBS.len());
    let v = &VERBS[vi];
    let (morphs, _) = conjugate(v, tense, person, plural);
    let lemma = format!("{}{}", v.stem, v.class);
    tgt.push((
        token(&morphs.concat(), &lemma, "VERB", verb_feats(tense, person, plural)),
        Slot::Verb { verb: vi, tense, person, plural },
    ));
    match tense {
        Tense::Pres if person == 3 && !plural => src.push(v.en_3sg.to_owned()),
        Tense::Pres => src.push(v.en.to_owned()),
        Tense::Past => src.push(v.en_past.to_owned()),
        Tense::Fut => {
            src.push(String::from("will"));
            src.push(v.en.to_owned());
        }
    }
    if rng.random_bool(0.8) {
        noun_phrase(rng, &mut tgt, &mut src, None);
    }
    if rng.random_bool(0.45) {
        let &(es, en) = ADPOSITIONS.choose(rng).unwrap_or(&ADPOSITIONS[0]);
        tgt.push((token(es, es, "ADP", FeatureSet::new()), Slot::Other));
        src.push(en.to_owned());
        noun_phrase(rng, &mut tgt, &mut src, None);
    }
    if rng.random_bool(0.2) {
        tgt.push((token("y", "y", "CCONJ", FeatureSet::new()), Slot::Other));
        src.push(String::from("and"));
        noun_phrase(rng, &mut tgt, &mut src, None);
    }
    if rng.random_bool(0.35) {
        let (es, en) = match tense {
            Tense::Past => ("ayer", "yesterday"),
            Tense::Fut => ("mañana", "tomorrow"),
            Tense::Pres => *[("hoy", "today"), ("siempre", "always")].choose(rng).unwrap_or(&("hoy", "today")),
        };
        tgt.push((token(es, es, "ADV", FeatureSet::new()), Slot::Other));
        src.push(en.to_owned());
    }
    tgt.push((token(".", ".", "PUNCT", FeatureSet::new()), Slot::Other));
    src.push(String::from("."));

    let (tokens, slots): (Vec<Token>, Vec<Slot>) = tgt.into_iter().unzip();
    let source = Sentence::from_tokens(src.iter().map(|w| english_token(w)).collect());
    Generated {
        target: Sentence::from_tokens(tokens),
        slots,
        source,
    }
}

fn english_token(w: &str) -> Token {
    let upos = match w {
        "the" | "a" | "some" => "DET",
        "I" | "you" | "he" | "she" | "we" | "they" => "PRON",
        "in" | "with" | "for" | "without" => "ADP",
        "and" => "CCONJ",
        "will" => "AUX",
        "yesterday" | "tomorrow" | "today" | "always" => "ADV",
        "." => "PUNCT",
        _ if NOUNS.iter().any(|n| n.en == w || n.en_pl == w) => "NOUN",
        _ if ADJECTIVES.iter().any(|a| a.2 == w) => "ADJ",
        _ => "VERB",
    };
    let mut feats = FeatureSet::new();
    if upos == "NOUN" {
        let plural = NOUNS.iter().any(|n| n.en_pl == w);
        feats.insert("Number".into(), if plural { "Plur" } else { "Sing" }.into());
    }
    if upos == "VERB" {
        if VERBS.iter().any(|v| v.en_past == w && v.en != w) {
            feats.insert("Tense".into(), "Past".into());
        } else if VERBS.iter().any(|v| v.en_3sg == w) {
            feats.insert("Number".into(), "Sing".into());
            feats.insert("Person".into(), "3".into());
        }
    }
    Token {
        surface: w.to_owned(),
        lemma: Some(w.to_lowercase()),
        upos: Some(upos.to_owned()),
        feats,
    }
}

/// How a system rendered one reference token.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Correct,
    Inflection,
    Lexical,
    Dropped,
}

/// Corrupts a reference sentence. Verb error rates grow with the number of
/// morphemes in the form, so morphologically heavier words fare worse.
fn translate<R: Rng>(rng: &mut R, g: &Generated, noise: f64) -> (Vec<String>, Vec<Outcome>) {
    let mut out = Vec::new();
    let mut outcomes = Vec::new();
    for (t, slot) in g.target.tokens.iter().zip(&g.slots) {
        let (word, outcome) = match *slot {
            Slot::Verb { verb, tense, person, plural } => {
                let (morphs, _) = conjugate(&VERBS[verb], tense, person, plural);
                let p = noise * (0.5 + 0.5 * morphs.len() as f64);
                if rng.random_bool(p.min(0.95)) {
                    if rng.random_bool(0.75) {
                        let &(p2, pl2) = PERSONS.choose(rng).unwrap_or(&(3, false));
                        let t2 = *[Tense::Pres, Tense::Past, Tense::Fut].choose(rng).unwrap_or(&tense);
                        let w = conjugate(&VERBS[verb], t2, p2, pl2).0.concat();
                        let o = if w == t.surface { Outcome::Correct } else { Outcome::Inflection };
                        (w, o)
                    } else {
                        let other = rng.random_range(0..VERBS.len());
                        let w = conjugate(&VERBS[other], tense, person, plural).0.concat();
                        let o = if w == t.surface { Outcome::Correct } else { Outcome::Lexical };
                        (w, o)
                    }
                } else {
                    (t.surface.clone(), Outcome::Correct)
                }
            }
            Slot::Noun { noun, plural } => {
                if rng.random_bool((noise * 1.2).min(0.95)) {
                    if rng.random_bool(0.6) {
                        (noun_morphs(&NOUNS[noun], !plural).concat(), Outcome::Inflection)
                    } else {
                        let other = rng.random_range(0..NOUNS.len());
                        let w = noun_morphs(&NOUNS[other], plural).concat();
                        let o = if other == noun { Outcome::Correct } else { Outcome::Lexical };
                        (w, o)
                    }
                } else {
                    (t.surface.clone(), Outcome::Correct)
                }
            }
            Slot::Adj { adj, fem, plural } => {
                if rng.random_bool(noise.min(0.95)) {
                    let w = adj_morphs(&ADJECTIVES[adj], !fem, plural).concat();
                    let o = if w == t.surface { Outcome::Correct } else { Outcome::Inflection };
                    (w, o)
                } else {
                    (t.surface.clone(), Outcome::Correct)
                }
            }
            Slot::Other => {
                if t.upos.as_deref() != Some("PUNCT") && rng.random_bool(noise * 0.3) {
                    outcomes.push(Outcome::Dropped);
                    continue;
                }
                (t.surface.clone(), Outcome::Correct)
            }
        };
        out.push(word);
        outcomes.push(outcome);
    }
    (out, outcomes)
}

fn human_scores<R: Rng>(rng: &mut R, corpus: &[Generated], outcomes: &[Vec<Outcome>]) -> String {
    let mut out = String::from("sentence_id\ttoken_index\tsemantic\tgrammar\n");
    for (s, (g, oc)) in corpus.iter().zip(outcomes).enumerate() {
        for (t, (tok, o)) in g.target.tokens.iter().zip(oc).enumerate() {
            if !matches!(tok.upos.as_deref(), Some("NOUN" | "VERB")) || !rng.random_bool(0.6) {
                continue;
            }
            let (sem, gram) = match o {
                Outcome::Correct => (if rng.random_bool(0.85) { 4 } else { 3 }, 3),
                Outcome::Inflection => (rng.random_range(2..=4), rng.random_range(1..=2)),
                Outcome::Lexical => (rng.random_range(1..=2), rng.random_range(2..=3)),
                Outcome::Dropped => (1, 1),
            };
            out.push_str(&format!("{s}\t{t}\t{sem}\t{gram}\n"));
        }
    }
    out
}

fn plain(sentences: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&s.join(" "));
        out.push('\n');
    }
    out
}

fn main() {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| String::from("crates/morphtypo/tests/fixtures/toy")),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let corpus: Vec<Generated> = (0..SENTENCES).map(|_| sentence(&mut rng)).collect();
    let train: Vec<Generated> = (0..TRAIN_SENTENCES).map(|_| sentence(&mut rng)).collect();

    let reference: Vec<Sentence> = corpus.iter().map(|g| g.target.clone()).collect();
    let source: Vec<Sentence> = corpus.iter().map(|g| g.source.clone()).collect();
    let write = |name: &str, text: &str| write_file(&dir.join(name), text).expect("write fixture");
    write("ref.es.conllu", &render_conllu(&reference));
    write("src.en.conllu", &render_conllu(&source));
    write("train.es.txt", &plain(train.iter().map(|g| g.target.surfaces())));
    write("train.en.txt", &plain(train.iter().map(|g| g.source.surfaces())));

    let mut sys_a_outcomes = Vec::new();
    for (name, noise) in [("sys_a", 0.12), ("sys_b", 0.3)] {
        let mut sys_rng = ChaCha8Rng::seed_from_u64(if name == "sys_a" { 11 } else { 22 });
        let (text, outcomes): (Vec<Vec<String>>, Vec<Vec<Outcome>>) =
            corpus.iter().map(|g| translate(&mut sys_rng, g, noise)).unzip();
        write(&format!("{name}.es.txt"), &plain(text.into_iter()));
        if name == "sys_a" {
            sys_a_outcomes = outcomes;
        }
    }
    let mut human_rng = ChaCha8Rng::seed_from_u64(33);
    write("human.sys_a.tsv", &human_scores(&mut human_rng, &corpus, &sys_a_outcomes));

    let gold = gold_lexicon();
    write("gold.es.tsv", &render_segmentations(gold.iter().map(|(w, m)| (w.as_str(), m))));

    // fill the annotation sheet from the generator's own analysis; the last
    // row is left blank so that some verbs stay uncovered
    // present and past 1pl forms can coincide, so analyses are keyed by tense
    let tense_tag = |t: Tense| match t {
        Tense::Pres => "PRS",
        Tense::Past => "PST",
        Tense::Fut => "FUT",
    };
    type Analysis = (Vec<String>, Vec<u32>);
    let analyses: BTreeMap<(String, &str), Analysis> = VERBS
        .iter()
        .flat_map(|v| {
            [Tense::Pres, Tense::Past, Tense::Fut].into_iter().flat_map(move |t| {
                PERSONS.iter().map(move |&(p, pl)| {
                    let (m, c) = conjugate(v, t, p, pl);
                    ((m.concat(), tense_tag(t)), (m, c))
                })
            })
        })
        .collect();
    let extraction = extract_unique_paradigms(&reference, &DEFAULT_VERB_POS);
    let mut rows = sheet_rows(&extraction.entries);
    let last = rows.len().saturating_sub(1);
    for (i, row) in rows.iter_mut().enumerate() {
        if i == last {
            continue;
        }
        let tag = ["PRS", "PST", "FUT"]
            .into_iter()
            .find(|t| row.features.split(';').any(|f| f == *t))
            .expect("finite tense");
        let (m, c) = &analyses[&(row.sample_form.clone(), tag)];
        row.segmentation = m.join("-");
        row.per_morph_features = c.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    }
    write_annotation_sheet(&dir.join("paradigms.es.tsv"), &rows).expect("write sheet");

    let types: BTreeSet<String> = reference.iter().flat_map(|s| s.surfaces()).collect();
    eprintln!(
        "{} sentences, {} target types, {} paradigm rows",
        reference.len(),
        types.len(),
        rows.len()
    );
}
