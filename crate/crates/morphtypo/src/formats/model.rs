use std::path::Path;

use morphtypo_core::segmenters::{ModelFile, SegmenterModel, MODEL_VERSION};

use super::{read_string, write_file};
use crate::error::{Error, Result};

/// Pretty JSON with a trailing newline; field order is fixed by the types
/// and maps are ordered, so equal models serialize to equal bytes.
pub fn serialize_model(model: &SegmenterModel) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&ModelFile::new(model.clone()))?;
    s.push('\n');
    Ok(s)
}

pub fn save_model(path: &Path, model: &SegmenterModel) -> Result<()> {
    write_file(path, &serialize_model(model)?)
}

pub fn load_model(path: &Path) -> Result<SegmenterModel> {
    let file: ModelFile = serde_json::from_str(&read_string(path)?)
        .map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    if file.version != MODEL_VERSION {
        return Err(Error::Input(format!(
            "{}: model version {} (supported: {MODEL_VERSION})",
            path.display(),
            file.version
        )));
    }
    Ok(file.model)
}
