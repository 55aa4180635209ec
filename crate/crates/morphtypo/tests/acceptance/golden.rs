use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use crate::{ensure, Outcome};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy")
}

/// Relative path -> contents for every file under `root`.
fn tree(root: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).map_err(|e| format!("{}: {e}", dir.display()))? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(out)
}

fn run_copy() -> Result<(tempfile::TempDir, BTreeMap<String, Vec<u8>>), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for entry in fs::read_dir(fixture_dir()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.is_file() {
            fs::copy(&path, dir.path().join(path.file_name().unwrap())).map_err(|e| e.to_string())?;
        }
    }
    let status = Command::new(env!("CARGO_BIN_EXE_morphtypo"))
        .args(["run", "--config", "run.toml"])
        .current_dir(dir.path())
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        status.status.success(),
        "run exited with {:?}: {}",
        status.status.code(),
        String::from_utf8_lossy(&status.stderr)
    );
    let files = tree(&dir.path().join("out"))?;
    Ok((dir, files))
}

fn compare(a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>, what: &str) -> Outcome {
    let ka: Vec<&String> = a.keys().collect();
    let kb: Vec<&String> = b.keys().collect();
    ensure!(ka == kb, "{what}: file sets differ: {ka:?} vs {kb:?}");
    for (name, bytes) in a {
        ensure!(&b[name] == bytes, "{what}: {name} differs");
    }
    Ok(())
}

pub fn end_to_end() -> Outcome {
    let (_d1, first) = run_copy()?;
    let (_d2, second) = run_copy()?;
    compare(&first, &second, "rerun")?;

    let stage_dirs = ["models/", "align/", "word_eval/", "predictors/", "fit/", "charts/"];
    for prefix in stage_dirs {
        ensure!(first.keys().any(|k| k.starts_with(prefix)), "no outputs under {prefix}");
    }
    for ext in [".csv", ".json", ".svg"] {
        ensure!(first.keys().any(|k| k.ends_with(ext)), "no {ext} outputs");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&first["manifest.json"]).map_err(|e| format!("manifest: {e}"))?;
    ensure!(manifest["status"] == "ok", "manifest status {}", manifest["status"]);

    let expected = tree(&fixture_dir().join("expected"))?;
    compare(&first, &expected, "against stored outputs")
}
