use std::path::Path;

use morphtypo_core::fusion_annotation::SheetRow;

use super::{read_string, write_file};
use crate::error::{Error, Result};

const COLUMNS: [&str; 7] = [
    "paradigm_id",
    "features",
    "termination",
    "sample_form",
    "segmentation",
    "per_morph_features",
    "root_flags",
];

/// Tab-separated sheet with a header. The optional `fusion` and `lemma`
/// columns are written only when some row uses them.
pub fn render_annotation_sheet(rows: &[SheetRow]) -> String {
    let with_fusion = rows.iter().any(|r| r.fusion.is_some());
    let with_lemma = rows.iter().any(|r| r.lemma.is_some());
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if with_fusion {
        header.push("fusion");
    }
    if with_lemma {
        header.push("lemma");
    }
    let mut out = header.join("\t");
    out.push('\n');
    for r in rows {
        let mut fields = vec![
            r.paradigm_id.as_str(),
            &r.features,
            &r.termination,
            &r.sample_form,
            &r.segmentation,
            &r.per_morph_features,
            &r.root_flags,
        ];
        if with_fusion {
            fields.push(r.fusion.as_deref().unwrap_or(""));
        }
        if with_lemma {
            fields.push(r.lemma.as_deref().unwrap_or(""));
        }
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    out
}

pub fn write_annotation_sheet(path: &Path, rows: &[SheetRow]) -> Result<()> {
    write_file(path, &render_annotation_sheet(rows))
}

/// Reads a sheet by header names; missing trailing cells are blank.
pub fn load_annotation_sheet(path: &Path) -> Result<Vec<SheetRow>> {
    let text = read_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let index = |name: &str| headers.iter().position(|h| h.trim() == name);
    for required in COLUMNS {
        if index(required).is_none() {
            return Err(Error::parse(path, 1, format!("missing column {required:?}")));
        }
    }
    let col = |rec: &csv::StringRecord, name: &str| -> Option<String> {
        index(name).map(|i| rec.get(i).unwrap_or("").trim().to_owned())
    };
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let get = |name: &str| col(&rec, name).unwrap_or_default();
        rows.push(SheetRow {
            paradigm_id: get("paradigm_id"),
            features: get("features"),
            termination: get("termination"),
            sample_form: get("sample_form"),
            segmentation: get("segmentation"),
            per_morph_features: get("per_morph_features"),
            root_flags: get("root_flags"),
            fusion: col(&rec, "fusion").filter(|s| !s.is_empty()),
            lemma: col(&rec, "lemma").filter(|s| !s.is_empty()),
        });
    }
    Ok(rows)
}
