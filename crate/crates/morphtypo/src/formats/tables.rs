use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use morphtypo_core::aligner::{SentenceAlignment, TranslationTable};
use morphtypo_core::corpus::{FeatureSet, FrequencyTable, GoldSegmentationLexicon};
use morphtypo_core::fusion_annotation::{OverrideTable, TokenOverride};
use morphtypo_core::indices::MorphFeatureProfile;
use morphtypo_core::segmenters::ExternalSegmentation;
use morphtypo_core::word_eval::HumanScore;

use super::read_lines;
use crate::error::{Error, Result};

/// A data row that was skipped, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    Ok(read_lines(path)?
        .into_iter()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .collect())
}

fn parse_usize(path: &Path, line: usize, field: &str, what: &str) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("bad {what} {field:?}")))
}

/// `word<TAB>morph1 morph2 ...` rows. Rows that do not concatenate to their
/// word, or repeat a word, are rejected and logged.
fn load_segmentation_rows<F>(path: &Path, mut insert: F) -> Result<Vec<Rejection>>
where
    F: FnMut(&str, Vec<String>) -> morphtypo_core::Result<()>,
{
    let mut rejected = Vec::new();
    for (n, line) in data_lines(path)? {
        let outcome = match line.split_once('\t') {
            None => Err(String::from("missing tab separator")),
            Some((word, morphs)) => {
                let morphs: Vec<String> = morphs.split_whitespace().map(str::to_owned).collect();
                insert(word.trim(), morphs).map_err(|e| e.to_string())
            }
        };
        if let Err(reason) = outcome {
            log::warn!("{}:{n}: rejected segmentation row: {reason}", path.display());
            rejected.push(Rejection { line: n, reason });
        }
    }
    Ok(rejected)
}

pub fn load_gold_segmentations(
    path: &Path,
    markers: &[char],
) -> Result<(GoldSegmentationLexicon, Vec<Rejection>)> {
    let mut lexicon = GoldSegmentationLexicon::new();
    let rejected = load_segmentation_rows(path, |w, m| lexicon.insert(w, m, markers))?;
    Ok((lexicon, rejected))
}

pub fn load_external_segmentation(
    path: &Path,
    name: &str,
    markers: &[char],
) -> Result<(ExternalSegmentation, Vec<Rejection>)> {
    let mut seg = ExternalSegmentation::new(name);
    let rejected = load_segmentation_rows(path, |w, m| seg.insert(w, m, markers))?;
    Ok((seg, rejected))
}

pub fn render_segmentations<'a, I, M>(entries: I) -> String
where
    I: IntoIterator<Item = (&'a str, M)>,
    M: AsRef<[String]>,
{
    let mut out = String::new();
    for (word, morphs) in entries {
        out.push_str(word);
        out.push('\t');
        out.push_str(&morphs.as_ref().join(" "));
        out.push('\n');
    }
    out
}

/// `form<TAB>count` rows; repeated forms are summed.
pub fn load_frequency_table(path: &Path, lowercase: bool) -> Result<FrequencyTable> {
    let mut table = FrequencyTable::new(lowercase);
    for (n, line) in data_lines(path)? {
        let (form, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, n, "expected form<TAB>count"))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, n, format!("bad count {count:?}")))?;
        table.add(form, count);
    }
    Ok(table)
}

pub fn render_frequency_table(table: &FrequencyTable) -> String {
    table.iter().map(|(f, c)| format!("{f}\t{c}\n")).collect()
}

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim() {
        "1" | "true" | "T" | "R" => Some(true),
        "0" | "false" | "F" => Some(false),
        _ => None,
    }
}

/// `word<TAB>m1|m2<TAB>f1,f2<TAB>rootflags` rows. Blank root flags mark the
/// first morpheme as the root.
pub fn load_profiles(path: &Path) -> Result<Vec<MorphFeatureProfile>> {
    let mut out = Vec::new();
    for (n, line) in data_lines(path)? {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            return Err(Error::parse(path, n, "expected word, morphs, feature counts[, root flags]"));
        }
        let morphs: Vec<String> = cols[1].split('|').map(|m| m.trim().to_owned()).collect();
        let counts = cols[2]
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(path, n, format!("bad feature counts {:?}", cols[2])))?;
        let flags: Vec<bool> = match cols.get(3).map(|s| s.trim()).filter(|s| !s.is_empty()) {
            None => (0..morphs.len()).map(|i| i == 0).collect(),
            Some(s) => s
                .split(',')
                .map(parse_flag)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::parse(path, n, format!("bad root flags {s:?}")))?,
        };
        let word: String = morphs.concat();
        if word != cols[0].trim() {
            return Err(Error::parse(path, n, format!("morphemes do not spell {:?}", cols[0])));
        }
        let profile = MorphFeatureProfile::from_parts(&morphs, &counts, &flags)
            .map_err(|e| Error::parse(path, n, e.to_string()))?;
        out.push(profile);
    }
    Ok(out)
}

/// One word per line (first whitespace-separated field).
pub fn load_vocab(path: &Path) -> Result<BTreeSet<String>> {
    Ok(data_lines(path)?
        .into_iter()
        .filter_map(|(_, l)| l.split_whitespace().next().map(str::to_owned))
        .collect())
}

fn parse_ud_feats(s: &str) -> std::result::Result<FeatureSet, String> {
    let mut feats = FeatureSet::new();
    if s.trim() == "_" || s.trim().is_empty() {
        return Ok(feats);
    }
    for pair in s.trim().split('|') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| format!("feature {pair:?} is not key=value"))?;
        feats.insert(k.to_owned(), v.to_owned());
    }
    Ok(feats)
}

/// `sentence_id<TAB>token_index<TAB>UPOS<TAB>FEATS` rows.
pub fn load_overrides(path: &Path) -> Result<OverrideTable> {
    let mut table = OverrideTable::new();
    for (n, line) in data_lines(path)? {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::parse(path, n, "expected sentence_id, token_index, UPOS, FEATS"));
        }
        let s = parse_usize(path, n, cols[0], "sentence id")?;
        let t = parse_usize(path, n, cols[1], "token index")?;
        let feats = parse_ud_feats(cols[3]).map_err(|m| Error::parse(path, n, m))?;
        table.insert(
            s,
            t,
            TokenOverride {
                upos: cols[2].trim().to_owned(),
                feats,
            },
        );
    }
    Ok(table)
}

/// `sentence_id<TAB>token_index<TAB>semantic<TAB>grammar` rows, with an
/// optional header line. Out-of-range scores are fatal.
pub fn load_human_scores(path: &Path) -> Result<Vec<HumanScore>> {
    let mut out = Vec::new();
    for (n, line) in data_lines(path)? {
        let cols: Vec<&str> = line.split('\t').collect();
        if out.is_empty() && cols.first().is_some_and(|c| c.trim() == "sentence_id") {
            continue;
        }
        if cols.len() != 4 {
            return Err(Error::parse(path, n, "expected sentence_id, token_index, semantic, grammar"));
        }
        let s = parse_usize(path, n, cols[0], "sentence id")?;
        let t = parse_usize(path, n, cols[1], "token index")?;
        let sem = parse_usize(path, n, cols[2], "semantic score")?;
        let gra = parse_usize(path, n, cols[3], "grammar score")?;
        let to_u8 = |v: usize| u8::try_from(v).unwrap_or(u8::MAX);
        out.push(
            HumanScore::new(s, t, to_u8(sem), to_u8(gra))
                .map_err(|e| Error::parse(path, n, e.to_string()))?,
        );
    }
    Ok(out)
}

pub fn parse_pharaoh_line(line: &str) -> std::result::Result<BTreeSet<(usize, usize)>, String> {
    line.split_whitespace()
        .map(|link| {
            let (i, j) = link
                .split_once('-')
                .ok_or_else(|| format!("malformed link {link:?}"))?;
            let i = i.parse().map_err(|_| format!("malformed link {link:?}"))?;
            let j = j.parse().map_err(|_| format!("malformed link {link:?}"))?;
            Ok((i, j))
        })
        .collect()
}

/// Pharaoh `i-j` links, one line per sentence, validated against the
/// (reference, hypothesis) sentence lengths.
pub fn load_alignment_pharaoh(path: &Path, lengths: &[(usize, usize)]) -> Result<Vec<SentenceAlignment>> {
    let lines = read_lines(path)?;
    if lines.len() != lengths.len() {
        return Err(Error::Input(format!(
            "{}: {} alignment lines for {} sentence pairs",
            path.display(),
            lines.len(),
            lengths.len()
        )));
    }
    lines
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(s, ((n, line), &(rl, hl)))| {
            let links = parse_pharaoh_line(line).map_err(|m| Error::parse(path, *n, m))?;
            let a = SentenceAlignment::new(s, links);
            a.validate(rl, hl).map_err(|e| Error::parse(path, *n, e.to_string()))?;
            Ok(a)
        })
        .collect()
}

pub fn render_pharaoh(alignments: &[SentenceAlignment]) -> String {
    let mut out = String::new();
    for a in alignments {
        let links: Vec<String> = a.links.iter().map(|(i, j)| format!("{i}-{j}")).collect();
        out.push_str(&links.join(" "));
        out.push('\n');
    }
    out
}

/// `src<TAB>tgt<TAB>prob`, preceded by a `# lowercase=` line.
pub fn render_translation_table(table: &TranslationTable) -> String {
    let mut out = format!("# lowercase={}\n", table.lowercase);
    for (s, t, p) in table.entries() {
        out.push_str(&format!("{s}\t{t}\t{p}\n"));
    }
    out
}

pub fn load_translation_table(path: &Path) -> Result<TranslationTable> {
    let mut table = TranslationTable::default();
    for (n, line) in read_lines(path)? {
        if let Some(flag) = line.strip_prefix("# lowercase=") {
            table.lowercase = flag.trim() == "true";
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(path, n, "expected src, tgt, prob"));
        }
        let p: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, n, format!("bad probability {:?}", cols[2])))?;
        table.insert(cols[0], cols[1], p);
    }
    Ok(table)
}

/// Two-column `key<TAB>value` numeric file keyed by sentence id, e.g.
/// externally computed metric scores.
pub fn load_sentence_scores(path: &Path) -> Result<BTreeMap<usize, f64>> {
    let mut out = BTreeMap::new();
    for (n, line) in data_lines(path)? {
        let Some((k, v)) = line.split_once(['\t', ',']) else {
            return Err(Error::parse(path, n, "expected sentence_id and score"));
        };
        if k.trim() == "sentence_id" {
            continue;
        }
        let k = parse_usize(path, n, k, "sentence id")?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, n, format!("bad score {v:?}")))?;
        out.insert(k, v);
    }
    Ok(out)
}
