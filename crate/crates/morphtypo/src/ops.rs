//! Corpus-level operations shared by the CLI subcommands and the pipeline
//! runner.

use std::collections::BTreeMap;
use std::path::Path;

use morphtypo_core::aligner::{
    align_sentence, train_ibm1_traced, AlignOptions, Ibm1Params, SentenceAlignment, SentencePair,
    TranslationTable,
};
use morphtypo_core::corpus::Sentence;
use morphtypo_core::metrics::{sentence_bleu, sentence_chrf, BLEU_MAX_N, CHRF_BETA, CHRF_MAX_N};
use morphtypo_core::predictors::{ModelRows, PredictorTable};
use morphtypo_core::segmenters::{
    train_bpe, train_morfessor, train_unigram, MorfessorParams, SegmenterModel, UnigramParams,
};
use morphtypo_core::stats::{fit_linear_model, fit_marginal, significant_predictors};
use morphtypo_core::word_eval::{word_accuracy, WordRecord};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{load_external_segmentation, load_model};
use crate::report::{FitReport, SentenceMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bpe,
    Unigram,
    Morfessor,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "bpe" => Ok(Method::Bpe),
            "unigram" | "unilm" => Ok(Method::Unigram),
            "morfessor" => Ok(Method::Morfessor),
            other => Err(Error::Input(format!("unknown method {other:?} (bpe, unigram, morfessor)"))),
        }
    }
}

pub fn train_model(corpus: &[Sentence], method: Method, vocab_size: Option<usize>) -> Result<SegmenterModel> {
    let need_vocab = || {
        vocab_size.ok_or_else(|| Error::Input(String::from("--vocab-size is required for bpe and unigram")))
    };
    Ok(match method {
        Method::Bpe => SegmenterModel::Bpe(train_bpe(corpus, need_vocab()?)?),
        Method::Unigram => SegmenterModel::Unigram(train_unigram(corpus, &UnigramParams::new(need_vocab()?))?),
        Method::Morfessor => SegmenterModel::Morfessor(train_morfessor(corpus, &MorfessorParams::default())?),
    })
}

/// A model JSON file, or a `.tsv` segmentation table imported as an
/// external segmenter.
pub fn load_segmenter(path: &Path) -> Result<SegmenterModel> {
    if path.extension().and_then(|e| e.to_str()) == Some("tsv") {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("external");
        let (seg, rejected) = load_external_segmentation(path, name, &[])?;
        if !rejected.is_empty() {
            log::warn!("{}: {} segmentation rows rejected", path.display(), rejected.len());
        }
        Ok(SegmenterModel::External(seg))
    } else {
        load_model(path)
    }
}

pub fn check_parallel(reference: &[Sentence], hypothesis: &[Sentence]) -> Result<()> {
    if reference.len() != hypothesis.len() {
        return Err(Error::Input(format!(
            "reference has {} sentences, hypothesis {}",
            reference.len(),
            hypothesis.len()
        )));
    }
    Ok(())
}

fn pairs(a: &[Sentence], b: &[Sentence]) -> Vec<SentencePair> {
    a.iter().zip(b).map(|(x, y)| (x.surfaces(), y.surfaces())).collect()
}

#[derive(Debug, Clone)]
pub struct AlignerTables {
    /// t(hyp | ref)
    pub forward: TranslationTable,
    /// t(ref | hyp)
    pub reverse: TranslationTable,
    pub forward_ll: Vec<f64>,
    pub reverse_ll: Vec<f64>,
}

/// Trains both directions on the (reference, hypothesis) pairs of all the
/// given systems.
pub fn train_aligner(reference: &[Sentence], systems: &[&[Sentence]], params: &Ibm1Params) -> Result<AlignerTables> {
    let mut fwd = Vec::new();
    let mut rev = Vec::new();
    for hyp in systems {
        check_parallel(reference, hyp)?;
        fwd.extend(pairs(reference, hyp));
        rev.extend(pairs(hyp, reference));
    }
    let (forward, f) = train_ibm1_traced(&fwd, params)?;
    let (reverse, r) = train_ibm1_traced(&rev, params)?;
    Ok(AlignerTables {
        forward,
        reverse,
        forward_ll: f.log_likelihood,
        reverse_ll: r.log_likelihood,
    })
}

pub fn apply_aligner(
    tables: &AlignerTables,
    reference: &[Sentence],
    hypothesis: &[Sentence],
    options: AlignOptions,
) -> Result<Vec<SentenceAlignment>> {
    check_parallel(reference, hypothesis)?;
    Ok(reference
        .iter()
        .zip(hypothesis)
        .enumerate()
        .map(|(i, (r, h))| {
            align_sentence(&tables.forward, &tables.reverse, i, &r.surfaces(), &h.surfaces(), options)
        })
        .collect())
}

pub fn word_records(
    reference: &[Sentence],
    hypothesis: &[Sentence],
    alignments: &[SentenceAlignment],
    pos: &[&str],
    casefold: bool,
) -> Result<Vec<WordRecord>> {
    check_parallel(reference, hypothesis)?;
    if alignments.len() != reference.len() {
        return Err(Error::Input(format!(
            "{} alignments for {} sentences",
            alignments.len(),
            reference.len()
        )));
    }
    let mut out = Vec::new();
    for ((r, h), a) in reference.iter().zip(hypothesis).zip(alignments) {
        a.validate(r.len(), h.len())?;
        out.extend(word_accuracy(r, h, a, pos, casefold));
    }
    Ok(out)
}

pub fn sentence_metrics(reference: &[Sentence], hypothesis: &[Sentence]) -> Result<Vec<SentenceMetrics>> {
    check_parallel(reference, hypothesis)?;
    Ok(reference
        .iter()
        .zip(hypothesis)
        .enumerate()
        .map(|(i, (r, h))| {
            let (rs, hs) = (r.surfaces(), h.surfaces());
            SentenceMetrics {
                sentence: i,
                bleu: sentence_bleu(&hs, &rs, BLEU_MAX_N),
                chrf: sentence_chrf(&hs.join(" "), &rs.join(" "), CHRF_MAX_N, CHRF_BETA).value,
            }
        })
        .collect())
}

pub fn metric_columns(metrics: &[SentenceMetrics]) -> BTreeMap<String, BTreeMap<usize, f64>> {
    let mut out = BTreeMap::new();
    out.insert(String::from("bleu"), metrics.iter().map(|m| (m.sentence, m.bleu)).collect());
    out.insert(String::from("chrf"), metrics.iter().map(|m| (m.sentence, m.chrf)).collect());
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Predictor subset; all table columns when empty.
    pub predictors: Vec<String>,
    pub standardize: bool,
    pub alpha: f64,
    pub bonferroni: bool,
    pub marginal: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            predictors: Vec::new(),
            standardize: true,
            alpha: 0.05,
            bonferroni: false,
            marginal: false,
        }
    }
}

/// Fits one model per metric (or, in marginal mode, one per metric and
/// predictor). Numerical failures are recorded in the report rather than
/// aborting the other fits.
pub fn fit_reports(
    system: &str,
    table: &PredictorTable,
    responses: &BTreeMap<String, BTreeMap<usize, f64>>,
    options: &FitOptions,
) -> Vec<FitReport> {
    let mut out = Vec::new();
    for (metric, values) in responses {
        let report = |predictor: Option<String>, rows: &ModelRows, fit: morphtypo_core::Result<_>| {
            let (fit, error) = match fit {
                Ok(f) => (Some(f), None),
                Err(e) => {
                    log::warn!("{system}/{metric}: {e}");
                    (None, Some(e.to_string()))
                }
            };
            let significant = fit
                .as_ref()
                .map(|f| significant_predictors(f, options.alpha, options.bonferroni))
                .unwrap_or_default();
            FitReport {
                system: system.to_owned(),
                metric: metric.clone(),
                mode: String::from(if options.marginal { "marginal" } else { "joint" }),
                predictor,
                excluded_sentences: rows.excluded.len(),
                fit,
                error,
                significant,
            }
        };
        if options.marginal {
            let names = if options.predictors.is_empty() {
                table.columns.clone()
            } else {
                options.predictors.clone()
            };
            for name in names {
                let rows = table.model_rows(std::slice::from_ref(&name), values);
                let fit = fit_marginal(&rows.rows, options.standardize)
                    .and_then(|mut v| v.pop().map(|(_, f)| f).unwrap_or(Err(morphtypo_core::Error::NoPredictors)));
                out.push(report(Some(name), &rows, fit));
            }
        } else {
            let rows = table.model_rows(&options.predictors, values);
            if !rows.excluded.is_empty() {
                log::info!("{system}/{metric}: {} sentences excluded", rows.excluded.len());
            }
            let fit = fit_linear_model(&rows.rows, options.standardize);
            out.push(report(None, &rows, fit));
        }
    }
    out
}
