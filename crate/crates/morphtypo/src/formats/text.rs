use std::path::Path;

use morphtypo_core::corpus::{FeatureSet, Sentence, Token};

use super::read_lines;
use crate::error::{Error, Result};

pub fn parse_plain_text(lines: &[(usize, String)]) -> Vec<Sentence> {
    lines
        .iter()
        .filter_map(|(_, l)| Sentence::from_plain_line(l))
        .collect()
}

/// One sentence per non-blank line, split on any whitespace.
pub fn load_plain_text(path: &Path) -> Result<Vec<Sentence>> {
    Ok(parse_plain_text(&read_lines(path)?))
}

fn parse_feats(field: &str) -> std::result::Result<FeatureSet, String> {
    let mut feats = FeatureSet::new();
    if field == "_" || field.is_empty() {
        return Ok(feats);
    }
    for pair in field.split('|') {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| format!("feature {pair:?} is not key=value"))?;
        if feats.insert(k.to_owned(), v.to_owned()).is_some() {
            return Err(format!("duplicate feature key {k:?}"));
        }
    }
    Ok(feats)
}

fn optional(field: &str) -> Option<String> {
    (field != "_" && !field.is_empty()).then(|| field.to_owned())
}

/// Reads FORM, LEMMA, UPOS and FEATS of a 10-column CoNLL-U file. Multiword
/// token ranges and empty nodes are skipped.
pub fn parse_conllu(path: &Path, lines: &[(usize, String)]) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                sentences.push(Sentence::from_tokens(std::mem::take(&mut tokens)));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(path, *n, format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        if cols[1].is_empty() {
            return Err(Error::parse(path, *n, "empty FORM"));
        }
        let feats = parse_feats(cols[5]).map_err(|m| Error::parse(path, *n, m))?;
        tokens.push(Token {
            surface: cols[1].to_owned(),
            lemma: optional(cols[2]),
            upos: optional(cols[3]),
            feats,
        });
    }
    if !tokens.is_empty() {
        sentences.push(Sentence::from_tokens(tokens));
    }
    Ok(sentences)
}

pub fn load_conllu(path: &Path) -> Result<Vec<Sentence>> {
    parse_conllu(path, &read_lines(path)?)
}

/// CoNLL-U for `.conllu` files, plain text otherwise.
pub fn load_corpus(path: &Path) -> Result<Vec<Sentence>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("conllu") | Some("conll") => load_conllu(path),
        _ => load_plain_text(path),
    }
}

/// CoNLL-U with the consumed columns filled and the rest left as "_".
pub fn render_conllu(corpus: &[Sentence]) -> String {
    let mut out = String::new();
    for (s, sentence) in corpus.iter().enumerate() {
        out.push_str(&format!("# sent_id = {s}\n# text = {}\n", sentence.raw));
        for (i, t) in sentence.tokens.iter().enumerate() {
            let feats = if t.feats.is_empty() {
                String::from("_")
            } else {
                t.feats
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join("|")
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t_\t{}\t_\t_\t_\t_\n",
                i + 1,
                t.surface,
                t.lemma.as_deref().unwrap_or("_"),
                t.upos.as_deref().unwrap_or("_"),
                feats
            ));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(s: &str) -> Vec<(usize, String)> {
        s.lines().enumerate().map(|(i, l)| (i + 1, l.to_owned())).collect()
    }

    #[test]
    fn plain_text_splits_on_tabs_and_skips_blank_lines() {
        let c = parse_plain_text(&lines("la casa roja\n\nuno\tdos  tres\n"));
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].len(), 3);
        assert_eq!(c[1].surfaces(), ["uno", "dos", "tres"]);
    }

    #[test]
    fn conllu_fields() {
        let src = "# text = x\n1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n1\tde\tde\tADP\t_\t_\t_\t_\t_\t_\n2\tel\tel\tDET\t_\tDefinite=Def|Gender=Masc\t_\t_\t_\t_\n2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n\n1\tMood\t_\tVERB\t_\tMood=Ind|Number=Sing\t_\t_\t_\t_\n";
        let c = parse_conllu(Path::new("t"), &lines(src)).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].surfaces(), ["de", "el"]);
        assert_eq!(c[0].tokens[0].feats.len(), 0);
        assert_eq!(c[0].tokens[1].feats.get("Gender").map(String::as_str), Some("Masc"));
        assert_eq!(c[1].tokens[0].feats.len(), 2);
        assert_eq!(c[1].tokens[0].lemma, None);

        let bad = parse_conllu(Path::new("t"), &lines("1\tde\tde\n"));
        assert!(matches!(bad, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn conllu_round_trip() {
        let src = "1\tcasas\tcasa\tNOUN\t_\tGender=Fem|Number=Plur\t_\t_\t_\t_\n2\t.\t.\tPUNCT\t_\t_\t_\t_\t_\t_\n";
        let c = parse_conllu(Path::new("t"), &lines(src)).unwrap();
        let again = parse_conllu(Path::new("t"), &lines(&render_conllu(&c))).unwrap();
        assert_eq!(c, again);
    }
}
