//! The index of synthesis (morphemes per word) and the index of fusion
//! (fusional joints over all joints), per word and per text.
//!
//! Joint counting uses one rule. Each morpheme carries a *load*: its number of
//! grammatical features, plus one if it carries the root. A morpheme with
//! load `L` contributes `max(L - 1, 0)` fusional joints, and a word of `k`
//! morphemes has `k - 1` explicit boundaries. So `habl-are-mos` (root, 2, 2
//! features) has 0 + 1 + 1 = 2 fusional joints and 2 boundaries, while a
//! suppletive `came` (root + PAST in one morph) has one fusional joint and
//! no boundary.

use alloc::string::String;
use alloc::vec::Vec;
use core::iter::Sum;
use core::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::segmenters::Segmenter;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointTally {
    pub fusional_joints: u64,
    pub explicit_boundaries: u64,
}

impl JointTally {
    pub fn total(&self) -> u64 {
        self.fusional_joints + self.explicit_boundaries
    }

    /// Fusional over total joints; zero with the `jointless` flag set when
    /// there are no joints at all.
    pub fn fusion(&self) -> FusionValue {
        match self.total() {
            0 => FusionValue {
                value: 0.0,
                jointless: true,
            },
            t => FusionValue {
                value: self.fusional_joints as f64 / t as f64,
                jointless: false,
            },
        }
    }
}

impl Add for JointTally {
    type Output = JointTally;

    fn add(self, rhs: JointTally) -> JointTally {
        JointTally {
            fusional_joints: self.fusional_joints + rhs.fusional_joints,
            explicit_boundaries: self.explicit_boundaries + rhs.explicit_boundaries,
        }
    }
}

impl AddAssign for JointTally {
    fn add_assign(&mut self, rhs: JointTally) {
        *self = *self + rhs;
    }
}

impl Sum for JointTally {
    fn sum<I: Iterator<Item = JointTally>>(iter: I) -> JointTally {
        iter.fold(JointTally::default(), Add::add)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionValue {
    pub value: f64,
    pub jointless: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphRecord {
    pub morpheme: String,
    pub feature_count: u32,
    pub carries_root: bool,
}

impl MorphRecord {
    pub fn new(morpheme: impl Into<String>, feature_count: u32, carries_root: bool) -> Self {
        MorphRecord {
            morpheme: morpheme.into(),
            feature_count,
            carries_root,
        }
    }

    pub fn load(&self) -> u32 {
        self.feature_count + u32::from(self.carries_root)
    }
}

/// Per-morpheme feature counts of one segmented word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphFeatureProfile {
    morphs: Vec<MorphRecord>,
}

impl MorphFeatureProfile {
    /// Requires at least one morpheme, no empty morphemes, and at least one
    /// root-bearing morpheme.
    pub fn new(morphs: Vec<MorphRecord>) -> Result<Self> {
        if morphs.is_empty() {
            return Err(Error::InvalidProfile(String::from("no morphemes")));
        }
        if morphs.iter().any(|m| m.morpheme.is_empty()) {
            return Err(Error::InvalidProfile(String::from("empty morpheme")));
        }
        if !morphs.iter().any(|m| m.carries_root) {
            return Err(Error::InvalidProfile(String::from(
                "no morpheme carries the root",
            )));
        }
        Ok(MorphFeatureProfile { morphs })
    }

    /// Builds a profile from parallel lists; lengths must agree.
    pub fn from_parts(morphs: &[String], feature_counts: &[u32], root_flags: &[bool]) -> Result<Self> {
        if morphs.len() != feature_counts.len() || morphs.len() != root_flags.len() {
            return Err(Error::InvalidProfile(alloc::format!(
                "{} morphemes but {} feature counts and {} root flags",
                morphs.len(),
                feature_counts.len(),
                root_flags.len()
            )));
        }
        Self::new(
            morphs
                .iter()
                .zip(feature_counts)
                .zip(root_flags)
                .map(|((m, &f), &r)| MorphRecord::new(m.clone(), f, r))
                .collect(),
        )
    }

    pub fn morphs(&self) -> &[MorphRecord] {
        &self.morphs
    }

    pub fn word(&self) -> String {
        self.morphs.iter().map(|m| m.morpheme.as_str()).collect()
    }
}

/// Number of morphemes in a word.
pub fn synthesis_word(morphs: &[String]) -> usize {
    morphs.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSummary {
    pub morphs: u64,
    pub words: u64,
    /// Words the segmenter could not analyse; each counted as one morph.
    pub unsegmented: u64,
    pub synthesis: f64,
}

/// Morphemes per word over all countable word tokens (punctuation and
/// numerals excluded).
pub fn synthesis_text<S: Segmenter + ?Sized>(
    corpus: &[Sentence],
    segmenter: &S,
) -> Result<SynthesisSummary> {
    let (mut morphs, mut words, mut unsegmented) = (0u64, 0u64, 0u64);
    for token in corpus
        .iter()
        .flat_map(|s| s.tokens.iter())
        .filter(|t| t.is_countable_word())
    {
        words += 1;
        match segmenter.segment(&token.surface) {
            Some(m) => morphs += synthesis_word(&m) as u64,
            None => {
                morphs += 1;
                unsegmented += 1;
            }
        }
    }
    if words == 0 {
        return Err(Error::InvalidArgument(String::from(
            "no countable words for the synthesis index",
        )));
    }
    Ok(SynthesisSummary {
        morphs,
        words,
        unsegmented,
        synthesis: morphs as f64 / words as f64,
    })
}

pub fn word_joints(profile: &MorphFeatureProfile) -> JointTally {
    JointTally {
        fusional_joints: profile
            .morphs
            .iter()
            .map(|m| u64::from(m.load().saturating_sub(1)))
            .sum(),
        explicit_boundaries: profile.morphs.len() as u64 - 1,
    }
}

pub fn fusion_word(profile: &MorphFeatureProfile) -> FusionValue {
    word_joints(profile).fusion()
}

/// Text-level fusion: summed fusional joints over summed joints.
pub fn fusion_text<'a>(profiles: impl IntoIterator<Item = &'a MorphFeatureProfile>) -> (JointTally, FusionValue) {
    let tally: JointTally = profiles.into_iter().map(word_joints).sum();
    (tally, tally.fusion())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn profile(spec: &[(&str, u32, bool)]) -> MorphFeatureProfile {
        MorphFeatureProfile::new(
            spec.iter()
                .map(|(m, f, r)| MorphRecord::new(*m, *f, *r))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn synthesis_counts() {
        assert_eq!(synthesis_word(&[String::from("casa")]), 1);
        let m: Vec<String> = ["habl", "are", "mos"].iter().map(|s| String::from(*s)).collect();
        assert_eq!(synthesis_word(&m), 3);
    }

    #[test]
    fn table_examples() {
        let hablaremos = profile(&[("habl", 0, true), ("are", 2, false), ("mos", 2, false)]);
        let t = word_joints(&hablaremos);
        assert_eq!((t.fusional_joints, t.total()), (2, 4));
        assert_eq!(fusion_word(&hablaremos).value, 0.5);

        let condeno = profile(&[("conden", 0, true), ("ó", 5, false)]);
        let t = word_joints(&condeno);
        assert_eq!((t.fusional_joints, t.total()), (4, 5));
        assert_eq!(fusion_word(&condeno).value, 0.8);

        let apoyada = profile(&[("apoy", 0, true), ("ada", 3, false)]);
        assert!((fusion_word(&apoyada).value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn suppletive_single_morph() {
        let came = profile(&[("came", 1, true)]);
        let t = word_joints(&came);
        assert_eq!((t.fusional_joints, t.explicit_boundaries), (1, 0));
        assert_eq!(fusion_word(&came).value, 1.0);
    }

    #[test]
    fn jointless_word_is_flagged() {
        let casa = profile(&[("casa", 0, true)]);
        let f = fusion_word(&casa);
        assert!(f.jointless);
        assert_eq!(f.value, 0.0);
        let (_, f) = fusion_text([&casa, &casa]);
        assert!(f.jointless);
    }

    #[test]
    fn infinitives_have_zero_fusion() {
        let hablar = profile(&[("habl", 0, true), ("ar", 1, false)]);
        let comer = profile(&[("com", 0, true), ("er", 1, false)]);
        let (tally, f) = fusion_text([&hablar, &comer]);
        assert_eq!(tally.explicit_boundaries, 2);
        assert_eq!(f.value, 0.0);
        assert!(!f.jointless);
    }

    #[test]
    fn invalid_profiles_rejected() {
        assert!(MorphFeatureProfile::new(vec![]).is_err());
        assert!(MorphFeatureProfile::new(vec![MorphRecord::new("ar", 1, false)]).is_err());
        let m = vec![String::from("habl"), String::from("ar")];
        assert!(MorphFeatureProfile::from_parts(&m, &[0], &[true, false]).is_err());
    }
}
