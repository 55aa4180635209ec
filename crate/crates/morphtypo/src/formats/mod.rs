//! Readers and writers for every on-disk format the toolkit consumes or
//! produces, apart from reports and charts.

mod model;
mod sheet;
mod tables;
mod text;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use model::{load_model, save_model, serialize_model};
pub use sheet::{load_annotation_sheet, render_annotation_sheet, write_annotation_sheet};
pub use tables::*;
pub use text::{load_conllu, load_corpus, load_plain_text, parse_conllu, parse_plain_text, render_conllu};

/// Lines of a UTF-8 file with 1-based line numbers; CR before LF is dropped.
/// Invalid UTF-8 is reported with the offending line.
pub fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw)
            .map_err(|e| Error::parse(path, i + 1, format!("invalid UTF-8: {e}")))?;
        out.push((i + 1, line.to_owned()));
    }
    if bytes.ends_with(b"\n") {
        out.pop();
    }
    Ok(out)
}

pub fn read_string(path: &Path) -> Result<String> {
    let lines = read_lines(path)?;
    let mut s = String::new();
    for (_, l) in lines {
        s.push_str(&l);
        s.push('\n');
    }
    Ok(s)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
