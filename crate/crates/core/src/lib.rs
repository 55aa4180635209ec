//! Morphological typology indices for corpus analysis and MT evaluation.
//!
//! This crate is the `no_std` (alloc) algorithmic core: the index of synthesis
//! and the index of fusion, three unsupervised subword segmenters, segmenter
//! evaluation by morpheme alignment, an IBM Model 1 word aligner, stratified
//! word-level translation accuracy, sentence-level BLEU/chrF, and the
//! per-sentence predictor tables with their least-squares significance
//! analysis. File formats, the CLI and report rendering live in the
//! `morphtypo` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod aligner;
pub mod corpus;
mod error;
pub mod fusion_annotation;
pub mod indices;
pub mod metrics;
pub mod predictors;
pub mod seg_eval;
pub mod segmenters;
pub mod stats;
pub mod word_eval;

pub use error::{Error, Result};
