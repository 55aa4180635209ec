//! Semi-automatic fusion annotation of verb paradigms.
//!
//! Verbs are keyed by their feature bundle plus the termination class of the
//! lemma (-ar/-er/-ir). One annotated sample per key (segmentation and
//! features per morpheme) fixes the fusion value for every verb sharing the
//! key, regardless of lemma. Irregular lemmas can be covered by per-lemma
//! exception rows, which take precedence.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{concatenates_to, FeatureSet, Sentence};
use crate::indices::{fusion_word, MorphFeatureProfile};
use crate::{Error, Result};

pub const DEFAULT_VERB_POS: [&str; 2] = ["VERB", "AUX"];

/// Sorted set of UniMorph-style tags.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeatureBundle(BTreeSet<String>);

impl FeatureBundle {
    /// Parses either UD (`Mood=Ind|Number=Plur`) or UniMorph (`V;IND;FUT;1;PL`)
    /// notation into the canonical tag set.
    pub fn parse(input: &str) -> FeatureBundle {
        let input = input.trim();
        if input.is_empty() || input == "_" {
            return FeatureBundle::default();
        }
        if input.contains('=') {
            let feats: FeatureSet = input
                .split(['|', ',', ' '])
                .filter_map(|kv| kv.split_once('='))
                .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
                .collect();
            FeatureBundle::from_ud(&feats)
        } else {
            let mut tags = BTreeSet::new();
            for tag in input.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                if tag == "V" {
                    continue;
                }
                let tag = tag.strip_prefix("V.").unwrap_or(tag);
                tags.insert(tag.to_owned());
            }
            FeatureBundle(tags)
        }
    }

    /// Maps UD features onto UniMorph tags. Unknown features pass through as
    /// `Key=Value`.
    pub fn from_ud(feats: &FeatureSet) -> FeatureBundle {
        let mut tags = BTreeSet::new();
        let verb_form = feats.get("VerbForm").map(String::as_str);
        let finite = matches!(verb_form, None | Some("Fin"));
        for (key, value) in feats {
            let mapped: &[&str] = match (key.as_str(), value.as_str()) {
                ("Mood", "Ind") => &["IND"],
                ("Mood", "Sub") => &["SBJV"],
                ("Mood", "Imp") => &["IMP"],
                ("Mood", "Cnd") => &["COND"],
                ("Tense", "Pres") => &["PRS"],
                ("Tense", "Fut") => &["FUT"],
                ("Tense", "Past") if finite => &["PST", "PFV"],
                ("Tense", "Past") => &["PST"],
                ("Tense", "Imp") => &["PST", "IPFV"],
                ("Person", "1") => &["1"],
                ("Person", "2") => &["2"],
                ("Person", "3") => &["3"],
                ("Number", "Sing") => &["SG"],
                ("Number", "Plur") => &["PL"],
                ("Gender", "Fem") => &["FEM"],
                ("Gender", "Masc") => &["MASC"],
                ("VerbForm", "Fin") => &[],
                ("VerbForm", "Inf") => &["NFIN"],
                ("VerbForm", "Ger") => &["CVB"],
                ("VerbForm", "Part") => &["PTCP", "PST"],
                _ => {
                    tags.insert(format!("{key}={value}"));
                    continue;
                }
            };
            tags.extend(mapped.iter().map(|t| String::from(*t)));
        }
        FeatureBundle(tags)
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(t)?;
        }
        Ok(())
    }
}

/// Spanish infinitive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Termination {
    Ar,
    Er,
    Ir,
    Other,
}

impl Termination {
    pub fn from_lemma(lemma: &str) -> Termination {
        let lemma = lemma.to_lowercase();
        if lemma.ends_with("ar") {
            Termination::Ar
        } else if lemma.ends_with("er") {
            Termination::Er
        } else if lemma.ends_with("ir") || lemma.ends_with("ír") {
            Termination::Ir
        } else {
            Termination::Other
        }
    }

    pub fn parse(s: &str) -> Option<Termination> {
        match s.trim().trim_start_matches('-').to_lowercase().as_str() {
            "ar" => Some(Termination::Ar),
            "er" => Some(Termination::Er),
            "ir" => Some(Termination::Ir),
            "other" => Some(Termination::Other),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Ar => "-ar",
            Termination::Er => "-er",
            Termination::Ir => "-ir",
            Termination::Other => "other",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParadigmKey {
    pub bundle: FeatureBundle,
    pub termination: Termination,
}

impl ParadigmKey {
    pub fn canonical(&self) -> String {
        format!("{}|{}", self.bundle, self.termination)
    }
}

impl fmt::Display for ParadigmKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.bundle, self.termination)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParadigmEntry {
    pub key: ParadigmKey,
    /// Most frequent (lowercased) surface realizing the key.
    pub sample_form: String,
    pub frequency: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    /// Sorted by canonical key.
    pub entries: Vec<ParadigmEntry>,
    /// Verb tokens keyed under "other" because they had no lemma.
    pub missing_lemma: usize,
}

/// Key of a token: its feature bundle plus the termination of its lemma.
/// Lemma-less tokens get [`Termination::Other`].
pub fn key_of(feats: &FeatureSet, lemma: Option<&str>) -> ParadigmKey {
    ParadigmKey {
        bundle: FeatureBundle::from_ud(feats),
        termination: lemma.map_or(Termination::Other, Termination::from_lemma),
    }
}

/// One entry per distinct (feature bundle, termination) among tokens whose
/// POS is in `pos_filter`.
pub fn extract_unique_paradigms(corpus: &[Sentence], pos_filter: &[&str]) -> Extraction {
    let mut forms: BTreeMap<ParadigmKey, BTreeMap<String, u64>> = BTreeMap::new();
    let mut missing_lemma = 0;
    for token in corpus.iter().flat_map(|s| s.tokens.iter()) {
        if !token.has_pos(pos_filter) {
            continue;
        }
        if token.lemma.is_none() {
            missing_lemma += 1;
        }
        let key = key_of(&token.feats, token.lemma.as_deref());
        *forms
            .entry(key)
            .or_default()
            .entry(token.surface.to_lowercase())
            .or_insert(0) += 1;
    }
    let entries = forms
        .into_iter()
        .map(|(key, counts)| {
            let frequency = counts.values().sum();
            // most frequent, ties to the lexicographically first form
            let sample_form = counts
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map(|(f, _)| f.clone())
                .unwrap_or_default();
            ParadigmEntry {
                key,
                sample_form,
                frequency,
            }
        })
        .collect();
    Extraction {
        entries,
        missing_lemma,
    }
}

/// One row of the annotation sheet, as plain text fields.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetRow {
    pub paradigm_id: String,
    pub features: String,
    pub termination: String,
    pub sample_form: String,
    pub segmentation: String,
    pub per_morph_features: String,
    pub root_flags: String,
    /// Optional fusion value written by the annotator; validated on ingest.
    pub fusion: Option<String>,
    /// Set on per-lemma exception rows.
    pub lemma: Option<String>,
}

/// Blank sheet rows, one per extracted key, in canonical key order.
pub fn sheet_rows(entries: &[ParadigmEntry]) -> Vec<SheetRow> {
    let mut sorted: Vec<&ParadigmEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.key.cmp(&b.key));
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, e)| SheetRow {
            paradigm_id: format!("P{:04}", i + 1),
            features: e.key.bundle.to_string(),
            termination: e.key.termination.to_string(),
            sample_form: e.sample_form.clone(),
            ..SheetRow::default()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadigmAnnotation {
    pub paradigm_id: String,
    pub key: ParadigmKey,
    pub sample_form: String,
    pub profile: MorphFeatureProfile,
    pub fusion: f64,
    pub lemma: Option<String>,
}

impl ParadigmAnnotation {
    /// The fully filled sheet row this annotation was (or could be) read from.
    pub fn to_sheet_row(&self) -> SheetRow {
        let morphs = self.profile.morphs();
        SheetRow {
            paradigm_id: self.paradigm_id.clone(),
            features: self.key.bundle.to_string(),
            termination: self.key.termination.to_string(),
            sample_form: self.sample_form.clone(),
            segmentation: morphs
                .iter()
                .map(|m| m.morpheme.as_str())
                .collect::<Vec<_>>()
                .join("-"),
            per_morph_features: morphs
                .iter()
                .map(|m| m.feature_count.to_string())
                .collect::<Vec<_>>()
                .join(","),
            root_flags: morphs
                .iter()
                .map(|m| if m.carries_root { "1" } else { "0" })
                .collect::<Vec<_>>()
                .join(","),
            fusion: None,
            lemma: self.lemma.clone(),
        }
    }
}

/// Why a sheet row could not be ingested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRejection {
    pub row: usize,
    pub reason: String,
}

/// Tolerance for annotator-provided fusion values, which are often
/// truncated to two decimals (0.66 for 2/3).
pub const PROVIDED_FUSION_TOLERANCE: f64 = 0.01;

fn split_list(s: &str) -> Vec<&str> {
    s.split([',', '-', ' ', ';'])
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .collect()
}

/// Parses a filled row. `Ok(Err(..))` is a rejected row; `Err(..)` is a hard
/// error (a provided fusion value that disagrees with the recomputation).
pub fn annotation_from_row(
    row_number: usize,
    row: &SheetRow,
) -> Result<core::result::Result<ParadigmAnnotation, RowRejection>> {
    let reject = |reason: String| {
        Ok(Err(RowRejection {
            row: row_number,
            reason,
        }))
    };
    let morphs: Vec<String> = row
        .segmentation
        .split('-')
        .map(|m| m.trim().to_owned())
        .filter(|m| !m.is_empty())
        .collect();
    if morphs.is_empty() {
        return reject(String::from("empty segmentation"));
    }
    if !concatenates_to(&row.sample_form, &morphs, &[]) {
        return reject(format!(
            "segmentation {:?} does not concatenate to {:?}",
            row.segmentation, row.sample_form
        ));
    }
    let mut counts = Vec::with_capacity(morphs.len());
    for c in split_list(&row.per_morph_features) {
        match c.parse::<u32>() {
            Ok(v) => counts.push(v),
            Err(_) => return reject(format!("bad feature count {c:?}")),
        }
    }
    if counts.len() != morphs.len() {
        return reject(format!(
            "{} feature counts for {} morphemes",
            counts.len(),
            morphs.len()
        ));
    }
    let flags: Vec<bool> = if row.root_flags.trim().is_empty() {
        (0..morphs.len()).map(|i| i == 0).collect()
    } else {
        let mut flags = Vec::new();
        for f in split_list(&row.root_flags) {
            match f {
                "1" | "true" | "R" | "r" => flags.push(true),
                "0" | "false" => flags.push(false),
                other => return reject(format!("bad root flag {other:?}")),
            }
        }
        flags
    };
    if flags.len() != morphs.len() {
        return reject(format!(
            "{} root flags for {} morphemes",
            flags.len(),
            morphs.len()
        ));
    }
    let Some(termination) = Termination::parse(&row.termination) else {
        return reject(format!("unknown termination {:?}", row.termination));
    };
    let profile = match MorphFeatureProfile::from_parts(&morphs, &counts, &flags) {
        Ok(p) => p,
        Err(e) => return reject(e.to_string()),
    };
    let fusion = fusion_word(&profile).value;
    if let Some(provided) = row.fusion.as_deref().map(str::trim).filter(|s| !s.is_empty()) {
        let Ok(provided) = provided.parse::<f64>() else {
            return reject(format!("bad fusion value {provided:?}"));
        };
        if (provided - fusion).abs() > PROVIDED_FUSION_TOLERANCE {
            return Err(Error::FusionMismatch {
                form: row.sample_form.clone(),
                provided,
                computed: fusion,
            });
        }
    }
    Ok(Ok(ParadigmAnnotation {
        paradigm_id: row.paradigm_id.clone(),
        key: ParadigmKey {
            bundle: FeatureBundle::parse(&row.features),
            termination,
        },
        sample_form: row.sample_form.clone(),
        profile,
        fusion,
        lemma: row
            .lemma
            .as_ref()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty()),
    }))
}

/// Ingested annotations: paradigm-level rows plus per-lemma exceptions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub paradigms: BTreeMap<ParadigmKey, ParadigmAnnotation>,
    pub exceptions: BTreeMap<(String, FeatureBundle), ParadigmAnnotation>,
}

impl AnnotationSet {
    /// Builds the set from filled rows (1-based row numbers are reported in
    /// rejections). Later rows for an already annotated key are rejected.
    pub fn ingest(rows: &[SheetRow]) -> Result<(AnnotationSet, Vec<RowRejection>)> {
        let mut set = AnnotationSet::default();
        let mut rejections = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let number = i + 1;
            match annotation_from_row(number, row)? {
                Err(r) => rejections.push(r),
                Ok(a) => {
                    let duplicate = match &a.lemma {
                        Some(lemma) => set
                            .exceptions
                            .insert((lemma.clone(), a.key.bundle.clone()), a)
                            .is_some(),
                        None => set.paradigms.insert(a.key.clone(), a).is_some(),
                    };
                    if duplicate {
                        rejections.push(RowRejection {
                            row: number,
                            reason: String::from("duplicate key; later row kept"),
                        });
                    }
                }
            }
        }
        Ok((set, rejections))
    }

    /// All annotations, paradigm rows first, each group in key order.
    pub fn rows(&self) -> Vec<SheetRow> {
        self.paradigms
            .values()
            .chain(self.exceptions.values())
            .map(ParadigmAnnotation::to_sheet_row)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.paradigms.len() + self.exceptions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenOverride {
    pub upos: String,
    pub feats: FeatureSet,
}

/// Manual corrections of POS and features, keyed by (sentence, token).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverrideTable {
    entries: BTreeMap<(usize, usize), TokenOverride>,
}

impl OverrideTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sentence: usize, token: usize, value: TokenOverride) {
        self.entries.insert((sentence, token), value);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns a corrected copy of the corpus; every override must point at
    /// an existing token.
    pub fn apply(&self, corpus: &[Sentence]) -> Result<Vec<Sentence>> {
        let mut out = corpus.to_vec();
        for (&(s, t), value) in &self.entries {
            let token = out
                .get_mut(s)
                .and_then(|sent| sent.tokens.get_mut(t))
                .ok_or(Error::BadOverride {
                    sentence: s,
                    token: t,
                })?;
            token.upos = Some(value.upos.clone());
            token.feats = value.feats.clone();
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    Covered,
    Exception,
    Uncovered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenFusion {
    pub sentence: usize,
    pub token: usize,
    pub surface: String,
    pub key: String,
    pub coverage: Coverage,
    pub fusion: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub tokens: Vec<TokenFusion>,
}

impl Projection {
    pub fn verbs(&self) -> usize {
        self.tokens.len()
    }

    pub fn covered(&self) -> usize {
        self.tokens.iter().filter(|t| t.fusion.is_some()).count()
    }

    /// Covered share of verb tokens; 1 for a verbless corpus.
    pub fn coverage_ratio(&self) -> f64 {
        if self.tokens.is_empty() {
            1.0
        } else {
            self.covered() as f64 / self.tokens.len() as f64
        }
    }

    /// Fusion per (sentence, token) for covered tokens.
    pub fn assignments(&self) -> BTreeMap<(usize, usize), f64> {
        self.tokens
            .iter()
            .filter_map(|t| t.fusion.map(|f| ((t.sentence, t.token), f)))
            .collect()
    }
}

/// Assigns the annotated fusion value to every verb whose key (after
/// overrides) is annotated. Per-lemma exceptions win over paradigm keys.
pub fn project_fusion(
    corpus: &[Sentence],
    annotations: &AnnotationSet,
    overrides: &OverrideTable,
    pos_filter: &[&str],
) -> Result<Projection> {
    let corrected = overrides.apply(corpus)?;
    let mut tokens = Vec::new();
    for (s, sentence) in corrected.iter().enumerate() {
        for (t, token) in sentence.tokens.iter().enumerate() {
            if !token.has_pos(pos_filter) {
                continue;
            }
            let key = key_of(&token.feats, token.lemma.as_deref());
            let exception = token.lemma.as_ref().and_then(|l| {
                annotations
                    .exceptions
                    .get(&(l.to_lowercase(), key.bundle.clone()))
            });
            let (coverage, fusion) = match exception {
                Some(a) => (Coverage::Exception, Some(a.fusion)),
                None => match annotations.paradigms.get(&key) {
                    Some(a) => (Coverage::Covered, Some(a.fusion)),
                    None => (Coverage::Uncovered, None),
                },
            };
            tokens.push(TokenFusion {
                sentence: s,
                token: t,
                surface: token.surface.clone(),
                key: key.canonical(),
                coverage,
                fusion,
            });
        }
    }
    Ok(Projection { tokens })
}
