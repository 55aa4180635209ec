use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Segmenter;
use crate::corpus::concatenates_to;
use crate::{Error, Result};

/// Segmentations produced elsewhere (e.g. a supervised neural segmenter)
/// and imported from a TSV file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalSegmentation {
    name: String,
    entries: BTreeMap<String, Vec<String>>,
}

impl ExternalSegmentation {
    pub fn new(name: impl Into<String>) -> Self {
        ExternalSegmentation {
            name: name.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn insert(&mut self, word: &str, morphs: Vec<String>, markers: &[char]) -> Result<()> {
        if morphs.iter().any(String::is_empty) || !concatenates_to(word, &morphs, markers) {
            return Err(Error::ConcatMismatch {
                word: String::from(word),
                morphs,
            });
        }
        self.entries.insert(String::from(word), morphs);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(w, m)| (w.as_str(), m.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Segmenter for ExternalSegmentation {
    fn segment(&self, word: &str) -> Option<Vec<String>> {
        self.entries.get(word).cloned()
    }
}
