//! Command-line interface.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use morphtypo_core::aligner::{AlignOptions, Ibm1Params};
use morphtypo_core::corpus::{FrequencyTable, Sentence, DEFAULT_FREQ_EDGES};
use morphtypo_core::fusion_annotation::{
    extract_unique_paradigms, project_fusion, sheet_rows, AnnotationSet, OverrideTable, DEFAULT_VERB_POS,
};
use morphtypo_core::indices::{fusion_text, fusion_word, synthesis_text, word_joints};
use morphtypo_core::predictors::{
    compute_predictors_bilingual, compute_predictors_fusion, compute_predictors_synthesis,
    verb_fusion_by_sentence, NamedSegmenter, PredictorTable,
};
use morphtypo_core::seg_eval::{eval_grouped, AlignParams, Denominator};
use morphtypo_core::segmenters::{Segmenter, SegmenterModel};
use morphtypo_core::word_eval::{
    aggregate_human_scores, annotate_records, stratify, Axis, HumanAggregation, RecordAnnotations,
    StratifiedTable, DEFAULT_MIN_SAMPLES,
};

use crate::chart::{render_chart, ChartData, Style};
use crate::error::{Error, Result};
use crate::formats::{self, write_file};
use crate::ops::{self, FitOptions, Method};
use crate::report::{self, FitReport};

#[derive(Debug, Parser)]
#[command(name = "morphtypo", version, about = "Morphological typology indices, segmenter evaluation and MT error analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a segmenter on a corpus
    Train(TrainArgs),
    /// Segment every distinct word of a file
    Segment(SegmentArgs),
    /// Score a segmenter against gold segmentations
    EvalSeg(EvalSegArgs),
    /// Index of synthesis of a corpus
    Synthesis(SynthesisArgs),
    /// Verb paradigm annotation workflow
    #[command(subcommand)]
    Fusion(FusionCommand),
    /// Word alignment of references and system outputs
    #[command(subcommand)]
    Align(AlignCommand),
    /// Word-level accuracy records and stratified tables
    WordEval(WordEvalArgs),
    /// Join human scores to word records and aggregate them
    HumanJoin(HumanJoinArgs),
    /// Sentence-level BLEU and chrF
    Metrics(MetricsArgs),
    /// Per-sentence predictor table
    Predictors(PredictorsArgs),
    /// Linear models of metric scores on predictors
    Fit(FitArgs),
    /// Render a report as SVG
    Chart(ChartArgs),
    /// Run a pipeline described by a TOML file
    Run(RunArgs),
}

fn comma_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_owned()).filter(|x| !x.is_empty()).collect()
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub vocab_size: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Model JSON, or a segmentation TSV
    #[arg(long)]
    pub model: PathBuf,
    /// Word list or corpus; every whitespace-separated token is segmented once
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalSegArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Divide exact matches by |hyp| (precision) or |gold|
    #[arg(long, default_value = "hyp")]
    pub denominator: String,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub gap: f64,
    /// Characters ignored by the gold concatenation check
    #[arg(long, default_value = "")]
    pub markers: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthesisArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum FusionCommand {
    /// List unique verb paradigm keys
    Extract(FusionCorpusArgs),
    /// Write a blank annotation sheet
    Sheet(FusionCorpusArgs),
    /// Validate a filled sheet and write it back normalized
    Ingest(FusionIngestArgs),
    /// Assign annotated fusion values to every verb of a corpus
    Project(FusionProjectArgs),
    /// Joint tallies and fusion of a profile file
    Score(FusionScoreArgs),
}

#[derive(Debug, Args)]
pub struct FusionCorpusArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_parser = |s: &str| Ok::<_, String>(comma_list(s)))]
    pub pos: Option<Vec<String>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FusionIngestArgs {
    #[arg(long)]
    pub sheet: PathBuf,
    /// Per-lemma exception sheet (same format, with a lemma column)
    #[arg(long)]
    pub exceptions: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FusionProjectArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub exceptions: Option<PathBuf>,
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    #[arg(long, value_parser = |s: &str| Ok::<_, String>(comma_list(s)))]
    pub pos: Option<Vec<String>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FusionScoreArgs {
    #[arg(long)]
    pub profiles: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum AlignCommand {
    /// Train forward and reverse IBM Model 1 tables
    Train(AlignTrainArgs),
    /// Align with trained tables (Pharaoh output)
    Apply(AlignApplyArgs),
    /// Validate and normalize an external Pharaoh alignment
    Import(AlignImportArgs),
}

#[derive(Debug, Args)]
pub struct AlignTrainArgs {
    #[arg(long)]
    pub reference: PathBuf,
    /// One or more system outputs; tables are pooled over all of them
    #[arg(long, required = true, num_args = 1..)]
    pub hypothesis: Vec<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub iterations: usize,
    #[arg(long)]
    pub no_lowercase: bool,
    /// Directory receiving forward.tsv and reverse.tsv
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AlignApplyArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub hypothesis: PathBuf,
    #[arg(long)]
    pub tables: PathBuf,
    #[arg(long)]
    pub grow_diag: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AlignImportArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub hypothesis: PathBuf,
    #[arg(long)]
    pub alignment: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct StratifyArgs {
    /// Comma-separated axes: morph_count, fusion, freq_bin, in_vocab
    #[arg(long, default_value = "freq_bin")]
    pub axes: String,
    #[arg(long, default_value_t = DEFAULT_MIN_SAMPLES)]
    pub min_samples: usize,
    #[arg(long, default_value = "0,100,1000")]
    pub freq_edges: String,
}

impl StratifyArgs {
    pub fn axes(&self) -> Result<Vec<Axis>> {
        parse_axes(&self.axes)
    }

    pub fn edges(&self) -> Result<Vec<i64>> {
        parse_edges(&self.freq_edges)
    }
}

pub fn parse_axes(s: &str) -> Result<Vec<Axis>> {
    comma_list(s)
        .iter()
        .map(|a| Axis::parse(a).ok_or_else(|| Error::Input(format!("unknown axis {a:?}"))))
        .collect()
}

pub fn parse_edges(s: &str) -> Result<Vec<i64>> {
    comma_list(s)
        .iter()
        .map(|e| e.parse().map_err(|_| Error::Input(format!("bad bin edge {e:?}"))))
        .collect()
}

#[derive(Debug, Args)]
pub struct WordEvalArgs {
    /// Reference corpus with POS tags (CoNLL-U)
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub hypothesis: PathBuf,
    /// Pharaoh alignment (reference-hypothesis)
    #[arg(long)]
    pub alignment: PathBuf,
    #[arg(long, default_value = "NOUN,VERB")]
    pub pos: String,
    /// Training corpus for word frequencies
    #[arg(long, conflicts_with = "freq")]
    pub train_corpus: Option<PathBuf>,
    /// Frequency table TSV
    #[arg(long)]
    pub freq: Option<PathBuf>,
    #[arg(long)]
    pub lowercase: bool,
    /// Words present as a single piece in the MT vocabulary
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Segmenter giving morpheme counts
    #[arg(long)]
    pub morph_model: Option<PathBuf>,
    /// Fusion projection CSV from `fusion project`
    #[arg(long)]
    pub fusion: Option<PathBuf>,
    #[arg(long)]
    pub casefold: bool,
    #[command(flatten)]
    pub stratify: StratifyArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct HumanJoinArgs {
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub scores: PathBuf,
    #[command(flatten)]
    pub stratify: StratifyArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub hypothesis: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictorsArgs {
    /// synthesis, fusion or bilingual
    #[arg(long, default_value = "synthesis")]
    pub kind: String,
    /// Evaluated-side corpus (CoNLL-U)
    #[arg(long)]
    pub reference: PathBuf,
    /// Source corpus for bilingual predictors
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Morpheme segmenter for morph.count
    #[arg(long)]
    pub morph_model: Option<PathBuf>,
    /// NAME=MODEL subword models on the evaluated side
    #[arg(long = "subword")]
    pub subwords: Vec<String>,
    /// NAME=MODEL subword models on the source side (bilingual)
    #[arg(long = "src-subword")]
    pub src_subwords: Vec<String>,
    /// Fusion projection CSV (fusion predictors)
    #[arg(long)]
    pub projection: Option<PathBuf>,
    /// Metric CSV(s) with sentence_id and score columns to append
    #[arg(long)]
    pub metrics: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long, default_value = "bleu,chrf")]
    pub response: String,
    #[arg(long, default_value = "system")]
    pub system: String,
    /// Predictor subset (default: every predictor column)
    #[arg(long)]
    pub predictors: Option<String>,
    #[arg(long)]
    pub marginal: bool,
    #[arg(long)]
    pub no_standardize: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub bonferroni: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Significance overview CSV
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    /// JSON report: stratified table, human aggregation or fit reports
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub style: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override a config key, e.g. --set fit.alpha=0.01
    #[arg(long = "set")]
    pub overrides: Vec<String>,
}

fn pos_list(pos: &Option<Vec<String>>) -> Vec<String> {
    pos.clone()
        .unwrap_or_else(|| DEFAULT_VERB_POS.iter().map(|s| s.to_string()).collect())
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn load_named_models(specs: &[String]) -> Result<Vec<(String, SegmenterModel)>> {
    specs
        .iter()
        .map(|s| {
            let (name, path) = s
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected NAME=MODEL, got {s:?}")))?;
            Ok((name.to_owned(), ops::load_segmenter(Path::new(path))?))
        })
        .collect()
}

fn named<'a>(models: &'a [(String, SegmenterModel)]) -> Vec<NamedSegmenter<'a>> {
    models.iter().map(|(n, m)| (n.as_str(), m as &dyn Segmenter)).collect()
}

fn load_annotations(sheet: &Path, exceptions: Option<&Path>) -> Result<AnnotationSet> {
    let mut rows = formats::load_annotation_sheet(sheet)?;
    if let Some(e) = exceptions {
        let mut extra = formats::load_annotation_sheet(e)?;
        if extra.iter().any(|r| r.lemma.is_none()) {
            return Err(Error::Input(format!("{}: exception rows need a lemma", e.display())));
        }
        rows.append(&mut extra);
    }
    let (set, rejections) = AnnotationSet::ingest(&rows)?;
    for r in &rejections {
        log::warn!("{}: row {} rejected: {}", sheet.display(), r.row, r.reason);
    }
    Ok(set)
}

/// Word records with frequency, vocabulary, morpheme and fusion columns.
pub struct RecordInputs<'a> {
    pub freq: Option<FrequencyTable>,
    pub vocab: BTreeSet<String>,
    pub morph_model: Option<&'a dyn Segmenter>,
    pub fusion: Option<BTreeMap<(usize, usize), f64>>,
}

pub fn annotate(records: &mut [morphtypo_core::word_eval::WordRecord], inputs: &RecordInputs<'_>) {
    let empty = FrequencyTable::new(false);
    annotate_records(
        records,
        &RecordAnnotations {
            freq_table: inputs.freq.as_ref().unwrap_or(&empty),
            model_vocab: &inputs.vocab,
            segmenter: inputs.morph_model,
            fusion: inputs.fusion.as_ref(),
        },
    );
}

pub fn write_stratified(dir: &Path, stem: &str, table: &StratifiedTable) -> Result<()> {
    write_file(&dir.join(format!("{stem}.csv")), &report::stratified_csv(table)?)?;
    write_file(&dir.join(format!("{stem}.json")), &report::json(table)?)
}

pub fn write_human(dir: &Path, agg: &HumanAggregation) -> Result<()> {
    write_file(&dir.join("human.csv"), &report::human_csv(agg)?)?;
    write_file(&dir.join("human.json"), &report::json(agg)?)
}

/// Runs one parsed command.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => {
            let corpus = formats::load_corpus(&a.input)?;
            let model = ops::train_model(&corpus, a.method, a.vocab_size)?;
            formats::save_model(&a.out, &model)
        }
        Command::Segment(a) => {
            let model = ops::load_segmenter(&a.model)?;
            let mut seen = BTreeSet::new();
            let mut rows = Vec::new();
            for (_, line) in formats::read_lines(&a.input)? {
                for w in line.split_whitespace() {
                    if seen.insert(w.to_owned()) {
                        match model.segment(w) {
                            Some(m) => rows.push((w.to_owned(), m)),
                            None => log::warn!("{w:?} is unsegmented by this model"),
                        }
                    }
                }
            }
            write_file(&a.out, &formats::render_segmentations(rows.iter().map(|(w, m)| (w.as_str(), m))))
        }
        Command::EvalSeg(a) => {
            let markers: Vec<char> = a.markers.chars().collect();
            let (gold, rejected) = formats::load_gold_segmentations(&a.gold, &markers)?;
            if !rejected.is_empty() {
                log::warn!("{} gold rows rejected", rejected.len());
            }
            let model = ops::load_segmenter(&a.model)?;
            let denominator = match a.denominator.as_str() {
                "hyp" => Denominator::Hyp,
                "gold" => Denominator::Gold,
                other => return Err(Error::Input(format!("unknown denominator {other:?}"))),
            };
            let eval = eval_grouped(&gold, &model, &AlignParams { gap: a.gap }, denominator);
            write_file(&a.out, &report::seg_eval_csv(&eval)?)?;
            if let Some(j) = a.json {
                write_file(&j, &report::json(&eval)?)?;
            }
            Ok(())
        }
        Command::Synthesis(a) => {
            let corpus = formats::load_corpus(&a.corpus)?;
            let model = ops::load_segmenter(&a.model)?;
            let summary = synthesis_text(&corpus, &model)?;
            write_file(&a.out, &report::synthesis_csv(&summary)?)
        }
        Command::Fusion(f) => fusion(f),
        Command::Align(c) => align(c),
        Command::WordEval(a) => {
            let reference = formats::load_corpus(&a.reference)?;
            let hypothesis = formats::load_corpus(&a.hypothesis)?;
            let lengths: Vec<(usize, usize)> = reference.iter().zip(&hypothesis).map(|(r, h)| (r.len(), h.len())).collect();
            ops::check_parallel(&reference, &hypothesis)?;
            let alignments = formats::load_alignment_pharaoh(&a.alignment, &lengths)?;
            let pos = comma_list(&a.pos);
            let mut records = ops::word_records(&reference, &hypothesis, &alignments, &as_strs(&pos), a.casefold)?;
            let freq = match (&a.train_corpus, &a.freq) {
                (Some(t), _) => Some(FrequencyTable::from_sentences(&formats::load_corpus(t)?, a.lowercase)),
                (None, Some(f)) => Some(formats::load_frequency_table(f, a.lowercase)?),
                (None, None) => None,
            };
            let morph = a.morph_model.as_deref().map(ops::load_segmenter).transpose()?;
            let fusion = match &a.fusion {
                Some(p) => Some(report::load_projection_csv(p)?.assignments()),
                None => None,
            };
            let inputs = RecordInputs {
                freq,
                vocab: match &a.vocab {
                    Some(v) => formats::load_vocab(v)?,
                    None => BTreeSet::new(),
                },
                morph_model: morph.as_ref().map(|m| m as &dyn Segmenter),
                fusion,
            };
            annotate(&mut records, &inputs);
            write_file(&a.out_dir.join("records.csv"), &report::records_csv(&records)?)?;
            let table = stratify(&records, &a.stratify.axes()?, a.stratify.min_samples, &a.stratify.edges()?)?;
            write_stratified(&a.out_dir, "stratified", &table)
        }
        Command::HumanJoin(a) => {
            let records = report::load_records_csv(&a.records)?;
            let scores = formats::load_human_scores(&a.scores)?;
            let agg = aggregate_human_scores(&scores, &records, &a.stratify.axes()?, &a.stratify.edges()?)?;
            for (s, t) in &agg.unmatched {
                log::warn!("human score for unknown record {s}:{t} skipped");
            }
            write_human(&a.out_dir, &agg)
        }
        Command::Metrics(a) => {
            let reference = formats::load_corpus(&a.reference)?;
            let hypothesis = formats::load_corpus(&a.hypothesis)?;
            let m = ops::sentence_metrics(&reference, &hypothesis)?;
            write_file(&a.out, &report::metrics_csv(&m)?)
        }
        Command::Predictors(a) => predictors(a),
        Command::Fit(a) => {
            let responses = comma_list(&a.response);
            let (table, resp) = report::load_predictors_csv(&a.table, &responses)?;
            let options = FitOptions {
                predictors: a.predictors.as_deref().map(comma_list).unwrap_or_default(),
                standardize: !a.no_standardize,
                alpha: a.alpha,
                bonferroni: a.bonferroni,
                marginal: a.marginal,
            };
            let reports = ops::fit_reports(&a.system, &table, &resp, &options);
            write_file(&a.out, &report::json(&reports)?)?;
            if let Some(g) = a.grid {
                write_file(&g, &report::significance_grid_csv(&reports)?)?;
            }
            match reports.iter().find_map(|r| r.error.clone()) {
                Some(e) if reports.iter().all(|r| r.fit.is_none()) => Err(Error::Numerical(e)),
                _ => Ok(()),
            }
        }
        Command::Chart(a) => {
            let style: Style = a.style.parse()?;
            let text = formats::read_string(&a.report)?;
            let svg = chart_from_json(&text, style)?;
            write_file(&a.out, &svg)
        }
        Command::Run(a) => {
            let outcome = crate::pipeline::run_file(&a.config, &a.overrides)?;
            if let Some(e) = outcome.failure {
                return Err(e);
            }
            Ok(())
        }
    }
}

/// Renders whichever report type the JSON holds.
pub fn chart_from_json(text: &str, style: Style) -> Result<String> {
    match style {
        Style::GroupedBars => {
            let t: StratifiedTable = serde_json::from_str(text)?;
            render_chart(ChartData::Stratified(&t), style)
        }
        Style::Bubble => {
            let h: HumanAggregation = serde_json::from_str(text)?;
            render_chart(ChartData::Human(&h), style)
        }
        Style::Grid => {
            let r: Vec<FitReport> = serde_json::from_str(text)?;
            render_chart(ChartData::Significance(&r), style)
        }
    }
}

fn fusion(cmd: FusionCommand) -> Result<()> {
    match cmd {
        FusionCommand::Extract(a) => {
            let corpus = formats::load_corpus(&a.corpus)?;
            let pos = pos_list(&a.pos);
            let ex = extract_unique_paradigms(&corpus, &as_strs(&pos));
            if ex.missing_lemma > 0 {
                log::warn!("{} verb tokens lack a lemma and were keyed as \"other\"", ex.missing_lemma);
            }
            let mut out = String::from("paradigm\tfeatures\ttermination\tsample_form\tfrequency\n");
            for e in &ex.entries {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    e.key.canonical(),
                    e.key.bundle,
                    e.key.termination,
                    e.sample_form,
                    e.frequency
                ));
            }
            write_file(&a.out, &out)
        }
        FusionCommand::Sheet(a) => {
            let corpus = formats::load_corpus(&a.corpus)?;
            let pos = pos_list(&a.pos);
            let ex = extract_unique_paradigms(&corpus, &as_strs(&pos));
            formats::write_annotation_sheet(&a.out, &sheet_rows(&ex.entries))
        }
        FusionCommand::Ingest(a) => {
            let set = load_annotations(&a.sheet, a.exceptions.as_deref())?;
            log::info!("{} annotations ingested", set.len());
            if let Some(out) = a.out {
                formats::write_annotation_sheet(&out, &set.rows())?;
            }
            Ok(())
        }
        FusionCommand::Project(a) => {
            let corpus = formats::load_corpus(&a.corpus)?;
            let set = load_annotations(&a.annotations, a.exceptions.as_deref())?;
            let overrides = match &a.overrides {
                Some(p) => formats::load_overrides(p)?,
                None => OverrideTable::new(),
            };
            let pos = pos_list(&a.pos);
            let projection = project_fusion(&corpus, &set, &overrides, &as_strs(&pos))?;
            log::info!(
                "coverage {}/{} verbs ({})",
                projection.covered(),
                projection.verbs(),
                projection.coverage_ratio()
            );
            write_file(&a.out, &report::projection_csv(&projection)?)
        }
        FusionCommand::Score(a) => {
            let profiles = formats::load_profiles(&a.profiles)?;
            let words: Vec<_> = profiles
                .iter()
                .map(|p| (p.word(), word_joints(p), fusion_word(p)))
                .collect();
            let total = fusion_text(&profiles);
            write_file(&a.out, &report::fusion_csv(&words, total)?)
        }
    }
}

fn align(cmd: AlignCommand) -> Result<()> {
    match cmd {
        AlignCommand::Train(a) => {
            let reference = formats::load_corpus(&a.reference)?;
            let systems: Vec<Vec<Sentence>> = a
                .hypothesis
                .iter()
                .map(|h| formats::load_corpus(h))
                .collect::<Result<_>>()?;
            let refs: Vec<&[Sentence]> = systems.iter().map(Vec::as_slice).collect();
            let params = Ibm1Params {
                iterations: a.iterations,
                lowercase: !a.no_lowercase,
            };
            let tables = ops::train_aligner(&reference, &refs, &params)?;
            write_file(&a.out_dir.join("forward.tsv"), &formats::render_translation_table(&tables.forward))?;
            write_file(&a.out_dir.join("reverse.tsv"), &formats::render_translation_table(&tables.reverse))
        }
        AlignCommand::Apply(a) => {
            let reference = formats::load_corpus(&a.reference)?;
            let hypothesis = formats::load_corpus(&a.hypothesis)?;
            let tables = ops::AlignerTables {
                forward: formats::load_translation_table(&a.tables.join("forward.tsv"))?,
                reverse: formats::load_translation_table(&a.tables.join("reverse.tsv"))?,
                forward_ll: Vec::new(),
                reverse_ll: Vec::new(),
            };
            let al = ops::apply_aligner(&tables, &reference, &hypothesis, AlignOptions { grow_diag: a.grow_diag })?;
            write_file(&a.out, &formats::render_pharaoh(&al))
        }
        AlignCommand::Import(a) => {
            let reference = formats::load_corpus(&a.reference)?;
            let hypothesis = formats::load_corpus(&a.hypothesis)?;
            ops::check_parallel(&reference, &hypothesis)?;
            let lengths: Vec<(usize, usize)> = reference.iter().zip(&hypothesis).map(|(r, h)| (r.len(), h.len())).collect();
            let al = formats::load_alignment_pharaoh(&a.alignment, &lengths)?;
            write_file(&a.out, &formats::render_pharaoh(&al))
        }
    }
}

/// Builds a predictor table of the given kind.
pub fn build_predictor_table(
    kind: &str,
    reference: &[Sentence],
    source: Option<&[Sentence]>,
    morph: Option<&dyn Segmenter>,
    subwords: &[NamedSegmenter<'_>],
    src_subwords: &[NamedSegmenter<'_>],
    projection: Option<&morphtypo_core::fusion_annotation::Projection>,
) -> Result<PredictorTable> {
    let mut table = PredictorTable::new();
    match kind {
        "synthesis" => {
            for (i, s) in reference.iter().enumerate() {
                table.push(i, compute_predictors_synthesis(s, morph, subwords));
            }
        }
        "fusion" => {
            let projection = projection.ok_or_else(|| Error::Input(String::from("fusion predictors need a projection")))?;
            let verbs = verb_fusion_by_sentence(projection);
            for (i, s) in reference.iter().enumerate() {
                let v = verbs.get(&i).map(Vec::as_slice).unwrap_or(&[]);
                table.push(i, compute_predictors_fusion(s, v, subwords));
            }
        }
        "bilingual" => {
            let source = source.ok_or_else(|| Error::Input(String::from("bilingual predictors need a source corpus")))?;
            if source.len() != reference.len() {
                return Err(Error::Input(String::from("source and reference differ in length")));
            }
            if src_subwords.len() != subwords.len() {
                return Err(Error::Input(String::from("give one source-side model per reference-side model")));
            }
            for (i, (s, r)) in source.iter().zip(reference).enumerate() {
                table.push(i, compute_predictors_bilingual(s, r, src_subwords, subwords));
            }
        }
        other => return Err(Error::Input(format!("unknown predictor kind {other:?}"))),
    }
    if !table.skipped.is_empty() {
        log::info!("{} sentences without countable words skipped", table.skipped.len());
    }
    Ok(table)
}

fn predictors(a: PredictorsArgs) -> Result<()> {
    let reference = formats::load_corpus(&a.reference)?;
    let source = a.source.as_deref().map(formats::load_corpus).transpose()?;
    let morph = a.morph_model.as_deref().map(ops::load_segmenter).transpose()?;
    let subwords = load_named_models(&a.subwords)?;
    let src_subwords = load_named_models(&a.src_subwords)?;
    let projection = a.projection.as_deref().map(report::load_projection_csv).transpose()?;
    let table = build_predictor_table(
        &a.kind,
        &reference,
        source.as_deref(),
        morph.as_ref().map(|m| m as &dyn Segmenter),
        &named(&subwords),
        &named(&src_subwords),
        projection.as_ref(),
    )?;
    let mut responses = BTreeMap::new();
    for m in &a.metrics {
        let (cols, _) = report::load_predictors_csv(m, &[])?;
        for name in &cols.columns {
            let values = cols
                .rows
                .iter()
                .filter_map(|(s, v)| v.get(name).map(|x| (*s, *x)))
                .collect();
            responses.insert(name.clone(), values);
        }
    }
    write_file(&a.out, &report::predictors_csv(&table, &responses)?)
}

/// Default frequency edges as a slice, for callers without CLI args.
pub fn default_edges() -> Vec<i64> {
    DEFAULT_FREQ_EDGES.to_vec()
}
