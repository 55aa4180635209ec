//! Declarative multi-stage runs driven by a TOML file.
//!
//! Relative paths in the config are resolved against the config file's
//! directory. Every output lands under `output`, next to `manifest.json`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use morphtypo_core::aligner::{AlignOptions, Ibm1Params};
use morphtypo_core::corpus::{FrequencyTable, Sentence, DEFAULT_FREQ_EDGES};
use morphtypo_core::fusion_annotation::{project_fusion, OverrideTable, Projection, DEFAULT_VERB_POS};
use morphtypo_core::indices::synthesis_text;
use morphtypo_core::seg_eval::{eval_grouped, AlignParams, Denominator};
use morphtypo_core::segmenters::{Segmenter, SegmenterModel};
use morphtypo_core::word_eval::{aggregate_human_scores, stratify, Axis, WordRecord, DEFAULT_MIN_SAMPLES};

use crate::chart::{render_chart, ChartData, Style};
use crate::cli::{annotate, build_predictor_table, RecordInputs};
use crate::error::{Error, Result};
use crate::formats::{self, write_file};
use crate::ops::{self, FitOptions, Method};
use crate::report::{self, FitReport};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub output: PathBuf,
    #[serde(default)]
    pub inputs: Inputs,
    /// System name to hypothesis corpus.
    #[serde(default)]
    pub systems: BTreeMap<String, PathBuf>,
    pub train: Option<TrainStage>,
    pub seg_eval: Option<SegEvalStage>,
    pub synthesis: Option<SynthesisStage>,
    pub fusion: Option<FusionStage>,
    pub align: Option<AlignStage>,
    pub word_eval: Option<WordEvalStage>,
    pub human: Option<HumanStage>,
    pub metrics: Option<MetricsStage>,
    pub predictors: Option<PredictorsStage>,
    pub fit: Option<FitStage>,
    pub chart: Option<ChartStage>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Evaluated-side reference corpus.
    pub reference: Option<PathBuf>,
    /// Source-side corpus, for bilingual predictors.
    pub source: Option<PathBuf>,
    /// Corpus for segmenter training and word frequencies.
    pub train_corpus: Option<PathBuf>,
    /// Source-side training corpus.
    pub source_train_corpus: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub freq: Option<PathBuf>,
    pub human_scores: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub exceptions: Option<PathBuf>,
    pub overrides: Option<PathBuf>,
    /// Pre-built models (JSON or segmentation TSV) by name.
    #[serde(default)]
    pub models: BTreeMap<String, PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub method: Method,
    pub vocab_size: Option<usize>,
    /// Train on the source-side corpus instead.
    #[serde(default)]
    pub source_side: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainStage {
    pub models: Vec<ModelSpec>,
}

fn default_gap() -> f64 {
    -0.5
}

fn default_denominator() -> String {
    String::from("hyp")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegEvalStage {
    /// Models to score; every target-side model when empty.
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default = "default_gap")]
    pub gap: f64,
    #[serde(default = "default_denominator")]
    pub denominator: String,
    #[serde(default)]
    pub markers: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisStage {
    pub models: Vec<String>,
}

fn verb_pos() -> Vec<String> {
    DEFAULT_VERB_POS.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionStage {
    #[serde(default = "verb_pos")]
    pub pos: Vec<String>,
}

fn five() -> usize {
    5
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignStage {
    #[serde(default = "five")]
    pub iterations: usize,
    #[serde(default = "yes")]
    pub lowercase: bool,
    #[serde(default)]
    pub grow_diag: bool,
    /// One pair of tables for all systems instead of one per system.
    #[serde(default)]
    pub pooled: bool,
}

fn noun_verb() -> Vec<String> {
    vec![String::from("NOUN"), String::from("VERB")]
}

fn freq_axis() -> Vec<String> {
    vec![String::from("freq_bin")]
}

fn min_samples() -> usize {
    DEFAULT_MIN_SAMPLES
}

fn freq_edges() -> Vec<i64> {
    DEFAULT_FREQ_EDGES.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordEvalStage {
    #[serde(default = "noun_verb")]
    pub pos: Vec<String>,
    #[serde(default = "freq_axis")]
    pub axes: Vec<String>,
    #[serde(default = "min_samples")]
    pub min_samples: usize,
    #[serde(default = "freq_edges")]
    pub freq_edges: Vec<i64>,
    #[serde(default)]
    pub casefold: bool,
    #[serde(default)]
    pub lowercase: bool,
    /// Model whose pieces count as the MT vocabulary.
    pub vocab_model: Option<String>,
    /// Model giving morpheme counts.
    pub morph_model: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanStage {
    pub system: String,
    #[serde(default = "freq_axis")]
    pub axes: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsStage {}

fn synthesis_kind() -> String {
    String::from("synthesis")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorsStage {
    #[serde(default = "synthesis_kind")]
    pub kind: String,
    pub morph_model: Option<String>,
    #[serde(default)]
    pub subwords: Vec<String>,
    #[serde(default)]
    pub src_subwords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitStage {
    #[serde(default)]
    pub predictors: Vec<String>,
    #[serde(default = "yes")]
    pub standardize: bool,
    #[serde(default = "alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub bonferroni: bool,
    #[serde(default)]
    pub marginal: bool,
}

fn alpha() -> f64 {
    0.05
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartStage {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub name: String,
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest_version: u32,
    pub toolkit: String,
    pub toolkit_version: String,
    pub config_sha256: String,
    pub parameters: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub stages: Vec<StageRecord>,
    pub status: StageStatus,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
    pub failure: Option<Error>,
}

/// Sets `a.b.c = value` in a TOML table. The value is parsed as TOML and
/// falls back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not KEY=VALUE")))?;
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_owned())),
        Err(_) => toml::Value::String(raw.to_owned()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key {key:?}")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?}: {p} is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_owned(), value);
    Ok(())
}

pub fn parse_config(text: &str, overrides: &[String]) -> Result<Config> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: Config = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl Config {
    fn target_models(&self) -> BTreeSet<String> {
        let mut names: BTreeSet<String> = self.inputs.models.keys().cloned().collect();
        if let Some(t) = &self.train {
            names.extend(t.models.iter().filter(|m| !m.source_side).map(|m| m.name.clone()));
        }
        names
    }

    fn all_models(&self) -> BTreeSet<String> {
        let mut names = self.target_models();
        if let Some(t) = &self.train {
            names.extend(t.models.iter().map(|m| m.name.clone()));
        }
        names
    }

    /// Structural checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        let models = self.all_models();
        let known = |name: &str, what: &str| -> Result<()> {
            if models.contains(name) {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} refers to unknown model {name:?}")))
            }
        };
        if let Some(t) = &self.train {
            let mut seen = BTreeSet::new();
            for m in &t.models {
                if !seen.insert(&m.name) || self.inputs.models.contains_key(&m.name) {
                    return err(format!("model name {:?} used twice", m.name));
                }
                if m.source_side && self.inputs.source_train_corpus.is_none() {
                    return err(format!("model {:?} needs inputs.source_train_corpus", m.name));
                }
                if !m.source_side && self.inputs.train_corpus.is_none() {
                    return err(format!("model {:?} needs inputs.train_corpus", m.name));
                }
            }
        }
        let need = |present: bool, what: &str, stage: &str| -> Result<()> {
            if present {
                Ok(())
            } else {
                Err(Error::Config(format!("stage {stage} needs {what}")))
            }
        };
        if let Some(s) = &self.seg_eval {
            need(self.inputs.gold.is_some(), "inputs.gold", "seg_eval")?;
            for m in &s.models {
                known(m, "seg_eval")?;
            }
            if !["hyp", "gold"].contains(&s.denominator.as_str()) {
                return err(format!("seg_eval.denominator must be hyp or gold, got {:?}", s.denominator));
            }
        }
        if let Some(s) = &self.synthesis {
            need(self.inputs.reference.is_some(), "inputs.reference", "synthesis")?;
            for m in &s.models {
                known(m, "synthesis")?;
            }
        }
        if self.fusion.is_some() {
            need(self.inputs.reference.is_some(), "inputs.reference", "fusion")?;
            need(self.inputs.annotations.is_some(), "inputs.annotations", "fusion")?;
        }
        let per_system = |stage: &str| -> Result<()> {
            need(self.inputs.reference.is_some(), "inputs.reference", stage)?;
            need(!self.systems.is_empty(), "at least one system", stage)
        };
        if self.align.is_some() {
            per_system("align")?;
        }
        if let Some(w) = &self.word_eval {
            per_system("word_eval")?;
            need(self.align.is_some(), "the align stage", "word_eval")?;
            for m in w.vocab_model.iter().chain(&w.morph_model) {
                known(m, "word_eval")?;
            }
            for a in &w.axes {
                axis(a)?;
            }
            if w.axes.iter().any(|a| a == "fusion") {
                need(self.fusion.is_some(), "the fusion stage", "word_eval")?;
            }
        }
        if let Some(h) = &self.human {
            need(self.inputs.human_scores.is_some(), "inputs.human_scores", "human")?;
            need(self.word_eval.is_some(), "the word_eval stage", "human")?;
            if !self.systems.contains_key(&h.system) {
                return err(format!("human.system {:?} is not a configured system", h.system));
            }
            for a in &h.axes {
                axis(a)?;
            }
        }
        if self.metrics.is_some() {
            per_system("metrics")?;
        }
        if let Some(p) = &self.predictors {
            per_system("predictors")?;
            need(self.metrics.is_some(), "the metrics stage", "predictors")?;
            for m in p.morph_model.iter().chain(&p.subwords).chain(&p.src_subwords) {
                known(m, "predictors")?;
            }
            match p.kind.as_str() {
                "synthesis" => {}
                "fusion" => need(self.fusion.is_some(), "the fusion stage", "predictors")?,
                "bilingual" => need(self.inputs.source.is_some(), "inputs.source", "predictors")?,
                other => return err(format!("unknown predictor kind {other:?}")),
            }
        }
        if self.fit.is_some() {
            need(self.predictors.is_some(), "the predictors stage", "fit")?;
        }
        Ok(())
    }

    /// Every input file with a stable name, in a fixed order.
    pub fn input_files(&self) -> Vec<(String, PathBuf)> {
        let i = &self.inputs;
        let mut out = Vec::new();
        let singles = [
            ("reference", &i.reference),
            ("source", &i.source),
            ("train_corpus", &i.train_corpus),
            ("source_train_corpus", &i.source_train_corpus),
            ("gold", &i.gold),
            ("freq", &i.freq),
            ("human_scores", &i.human_scores),
            ("annotations", &i.annotations),
            ("exceptions", &i.exceptions),
            ("overrides", &i.overrides),
        ];
        for (name, p) in singles {
            if let Some(p) = p {
                out.push((name.to_owned(), p.clone()));
            }
        }
        for (name, p) in &i.models {
            out.push((format!("models.{name}"), p.clone()));
        }
        for (name, p) in &self.systems {
            out.push((format!("systems.{name}"), p.clone()));
        }
        out
    }
}

fn axis(name: &str) -> Result<Axis> {
    Axis::parse(name).ok_or_else(|| Error::Config(format!("unknown axis {name:?}")))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().replace('\\', "/")
}

/// Reads and runs a config file.
pub fn run_file(config_path: &Path, overrides: &[String]) -> Result<RunOutcome> {
    let text = formats::read_string(config_path)?;
    let config = parse_config(&text, overrides)?;
    let base = config_path.parent().unwrap_or(Path::new("")).to_path_buf();
    run(&config, &base)
}

/// Runs every configured stage. Input problems abort before any output is
/// written; a failing stage stops the run, keeps what was written so far
/// and is recorded in the manifest.
pub fn run(config: &Config, base: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let mut inputs = Vec::new();
    for (name, rel) in config.input_files() {
        let path = base.join(&rel);
        let bytes = std::fs::read(&path)
            .map_err(|e| Error::Input(format!("input {name} ({}): {e}", path.display())))?;
        inputs.push(InputRecord {
            name,
            path: path_string(&rel),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }
    let parameters = serde_json::to_value(config)?;
    let config_sha256 = sha256_hex(serde_json::to_string(&parameters)?.as_bytes());
    let out_dir = base.join(&config.output);

    let mut runner = Runner {
        config,
        base,
        out: &out_dir,
        stages: Vec::new(),
        state: State::default(),
    };
    let failure = runner.run_all();
    let status = if failure.is_some() {
        StageStatus::Failed
    } else {
        StageStatus::Ok
    };
    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        toolkit: String::from(env!("CARGO_PKG_NAME")),
        toolkit_version: String::from(env!("CARGO_PKG_VERSION")),
        config_sha256,
        parameters,
        inputs,
        stages: runner.stages,
        status,
    };
    write_file(&out_dir.join("manifest.json"), &report::json(&manifest)?)?;
    Ok(RunOutcome {
        output_dir: out_dir,
        manifest,
        failure,
    })
}

#[derive(Default)]
struct State {
    reference: Option<Vec<Sentence>>,
    systems: BTreeMap<String, Vec<Sentence>>,
    models: BTreeMap<String, SegmenterModel>,
    projection: Option<Projection>,
    records: BTreeMap<String, Vec<WordRecord>>,
    metrics: BTreeMap<String, BTreeMap<String, BTreeMap<usize, f64>>>,
    predictors: BTreeMap<String, morphtypo_core::predictors::PredictorTable>,
    stratified: BTreeMap<String, morphtypo_core::word_eval::StratifiedTable>,
    human: Option<morphtypo_core::word_eval::HumanAggregation>,
    fits: Vec<FitReport>,
}

struct Runner<'a> {
    config: &'a Config,
    base: &'a Path,
    out: &'a Path,
    stages: Vec<StageRecord>,
    state: State,
}

type StageFn<'a> = fn(&mut Runner<'a>, &mut Vec<String>) -> Result<()>;

impl<'a> Runner<'a> {
    fn input(&self, p: &Path) -> PathBuf {
        self.base.join(p)
    }

    fn emit(&self, outputs: &mut Vec<String>, rel: &str, contents: &str) -> Result<()> {
        write_file(&self.out.join(rel), contents)?;
        outputs.push(rel.to_owned());
        Ok(())
    }

    fn run_all(&mut self) -> Option<Error> {
        let c = self.config;
        let plan: Vec<(&str, bool, StageFn<'a>)> = vec![
            ("train", c.train.is_some() || !c.inputs.models.is_empty(), Runner::stage_train),
            ("seg_eval", c.seg_eval.is_some(), Runner::stage_seg_eval),
            ("synthesis", c.synthesis.is_some(), Runner::stage_synthesis),
            ("fusion", c.fusion.is_some(), Runner::stage_fusion),
            ("align", c.align.is_some(), Runner::stage_align),
            ("word_eval", c.word_eval.is_some(), Runner::stage_word_eval),
            ("human", c.human.is_some(), Runner::stage_human),
            ("metrics", c.metrics.is_some(), Runner::stage_metrics),
            ("predictors", c.predictors.is_some(), Runner::stage_predictors),
            ("fit", c.fit.is_some(), Runner::stage_fit),
            ("chart", c.chart.is_some(), Runner::stage_chart),
        ];
        let mut failure = None;
        for (name, enabled, f) in plan {
            if !enabled {
                continue;
            }
            let mut outputs = Vec::new();
            let (status, error) = if failure.is_some() {
                (StageStatus::Skipped, None)
            } else {
                log::info!("stage {name}");
                match f(self, &mut outputs) {
                    Ok(()) => (StageStatus::Ok, None),
                    Err(e) => {
                        let msg = e.to_string();
                        failure = Some(e);
                        (StageStatus::Failed, Some(msg))
                    }
                }
            };
            self.stages.push(StageRecord {
                name: name.to_owned(),
                status,
                outputs,
                error,
            });
        }
        failure
    }

    fn reference(&mut self) -> Result<&[Sentence]> {
        if self.state.reference.is_none() {
            let p = self.config.inputs.reference.as_ref().expect("validated");
            self.state.reference = Some(formats::load_corpus(&self.input(p))?);
        }
        Ok(self.state.reference.as_deref().unwrap_or(&[]))
    }

    fn load_systems(&mut self) -> Result<()> {
        for (name, p) in &self.config.systems {
            if !self.state.systems.contains_key(name) {
                let corpus = formats::load_corpus(&self.base.join(p))?;
                self.state.systems.insert(name.clone(), corpus);
            }
        }
        Ok(())
    }

    fn model(&self, name: &str) -> Result<&SegmenterModel> {
        self.state
            .models
            .get(name)
            .ok_or_else(|| Error::Config(format!("model {name:?} is not available")))
    }

    fn named<'n>(&'n self, names: &'n [String]) -> Result<Vec<(&'n str, &'n dyn Segmenter)>> {
        names
            .iter()
            .map(|n| Ok((n.as_str(), self.model(n)? as &dyn Segmenter)))
            .collect()
    }

    fn stage_train(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        for (name, p) in &self.config.inputs.models {
            let m = ops::load_segmenter(&self.input(p))?;
            self.state.models.insert(name.clone(), m);
        }
        let Some(train) = &self.config.train else {
            return Ok(());
        };
        let mut corpora: BTreeMap<bool, Vec<Sentence>> = BTreeMap::new();
        for spec in &train.models {
            if let std::collections::btree_map::Entry::Vacant(slot) = corpora.entry(spec.source_side) {
                let p = if spec.source_side {
                    &self.config.inputs.source_train_corpus
                } else {
                    &self.config.inputs.train_corpus
                };
                slot.insert(formats::load_corpus(&self.input(p.as_ref().expect("validated")))?);
            }
            let model = ops::train_model(&corpora[&spec.source_side], spec.method, spec.vocab_size)?;
            self.emit(outputs, &format!("models/{}.json", spec.name), &formats::serialize_model(&model)?)?;
            self.state.models.insert(spec.name.clone(), model);
        }
        Ok(())
    }

    fn stage_seg_eval(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let s = self.config.seg_eval.as_ref().expect("enabled");
        let markers: Vec<char> = s.markers.chars().collect();
        let gold_path = self.input(self.config.inputs.gold.as_ref().expect("validated"));
        let (gold, rejected) = formats::load_gold_segmentations(&gold_path, &markers)?;
        if !rejected.is_empty() {
            log::warn!("{} gold rows rejected", rejected.len());
        }
        let names: Vec<String> = if s.models.is_empty() {
            self.config.target_models().into_iter().collect()
        } else {
            s.models.clone()
        };
        let denominator = if s.denominator == "gold" {
            Denominator::Gold
        } else {
            Denominator::Hyp
        };
        for name in names {
            let eval = eval_grouped(&gold, self.model(&name)?, &AlignParams { gap: s.gap }, denominator);
            self.emit(outputs, &format!("seg_eval/{name}.csv"), &report::seg_eval_csv(&eval)?)?;
        }
        Ok(())
    }

    fn stage_synthesis(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let s = self.config.synthesis.as_ref().expect("enabled");
        self.reference()?;
        for name in &s.models {
            let corpus = self.state.reference.as_deref().unwrap_or(&[]);
            let summary = synthesis_text(corpus, self.model(name)?)?;
            self.emit(outputs, &format!("synthesis/{name}.csv"), &report::synthesis_csv(&summary)?)?;
        }
        Ok(())
    }

    fn stage_fusion(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let f = self.config.fusion.as_ref().expect("enabled");
        let i = &self.config.inputs;
        let mut rows = formats::load_annotation_sheet(&self.input(i.annotations.as_ref().expect("validated")))?;
        if let Some(e) = &i.exceptions {
            rows.extend(formats::load_annotation_sheet(&self.input(e))?);
        }
        let (set, rejections) = morphtypo_core::fusion_annotation::AnnotationSet::ingest(&rows)?;
        for r in &rejections {
            log::warn!("annotation row {} rejected: {}", r.row, r.reason);
        }
        let overrides = match &i.overrides {
            Some(p) => formats::load_overrides(&self.input(p))?,
            None => OverrideTable::new(),
        };
        let pos: Vec<&str> = f.pos.iter().map(String::as_str).collect();
        let corpus = self.reference()?;
        let projection = project_fusion(corpus, &set, &overrides, &pos)?;
        self.emit(outputs, "fusion/projection.csv", &report::projection_csv(&projection)?)?;
        self.state.projection = Some(projection);
        Ok(())
    }

    fn stage_align(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let a = self.config.align.as_ref().expect("enabled");
        self.reference()?;
        self.load_systems()?;
        let reference = self.state.reference.as_deref().unwrap_or(&[]);
        let params = Ibm1Params {
            iterations: a.iterations,
            lowercase: a.lowercase,
        };
        let options = AlignOptions { grow_diag: a.grow_diag };
        let mut written = Vec::new();
        if a.pooled {
            let all: Vec<&[Sentence]> = self.state.systems.values().map(Vec::as_slice).collect();
            let tables = ops::train_aligner(reference, &all, &params)?;
            written.push(("align/forward.tsv".to_owned(), formats::render_translation_table(&tables.forward)));
            written.push(("align/reverse.tsv".to_owned(), formats::render_translation_table(&tables.reverse)));
            for (name, hyp) in &self.state.systems {
                let al = ops::apply_aligner(&tables, reference, hyp, options)?;
                written.push((format!("align/{name}.pharaoh"), formats::render_pharaoh(&al)));
            }
        } else {
            for (name, hyp) in &self.state.systems {
                let tables = ops::train_aligner(reference, &[hyp.as_slice()], &params)?;
                written.push((format!("align/{name}/forward.tsv"), formats::render_translation_table(&tables.forward)));
                written.push((format!("align/{name}/reverse.tsv"), formats::render_translation_table(&tables.reverse)));
                let al = ops::apply_aligner(&tables, reference, hyp, options)?;
                written.push((format!("align/{name}.pharaoh"), formats::render_pharaoh(&al)));
            }
        }
        for (rel, text) in written {
            self.emit(outputs, &rel, &text)?;
        }
        Ok(())
    }

    fn stage_word_eval(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let w = self.config.word_eval.as_ref().expect("enabled");
        let i = &self.config.inputs;
        let freq = match (&i.freq, &i.train_corpus) {
            (Some(f), _) => Some(formats::load_frequency_table(&self.input(f), w.lowercase)?),
            (None, Some(t)) => Some(FrequencyTable::from_sentences(
                &formats::load_corpus(&self.input(t))?,
                w.lowercase,
            )),
            (None, None) => None,
        };
        let vocab: BTreeSet<String> = match &w.vocab_model {
            Some(m) => self.model(m)?.vocabulary().into_iter().collect(),
            None => BTreeSet::new(),
        };
        let morph = match &w.morph_model {
            Some(m) => Some(self.model(m)? as &dyn Segmenter),
            None => None,
        };
        let inputs = RecordInputs {
            freq,
            vocab,
            morph_model: morph,
            fusion: self.state.projection.as_ref().map(Projection::assignments),
        };
        let axes: Vec<Axis> = w.axes.iter().map(|a| axis(a)).collect::<Result<_>>()?;
        let pos: Vec<&str> = w.pos.iter().map(String::as_str).collect();
        let reference = self.state.reference.as_deref().unwrap_or(&[]);
        let mut written = Vec::new();
        let mut records = BTreeMap::new();
        let mut tables = BTreeMap::new();
        for (name, hyp) in &self.state.systems {
            let lengths: Vec<(usize, usize)> = reference.iter().zip(hyp).map(|(r, h)| (r.len(), h.len())).collect();
            let al = formats::load_alignment_pharaoh(&self.out.join(format!("align/{name}.pharaoh")), &lengths)?;
            let mut recs = ops::word_records(reference, hyp, &al, &pos, w.casefold)?;
            annotate(&mut recs, &inputs);
            let table = stratify(&recs, &axes, w.min_samples, &w.freq_edges)?;
            written.push((format!("word_eval/{name}/records.csv"), report::records_csv(&recs)?));
            written.push((format!("word_eval/{name}/stratified.csv"), report::stratified_csv(&table)?));
            written.push((format!("word_eval/{name}/stratified.json"), report::json(&table)?));
            records.insert(name.clone(), recs);
            tables.insert(name.clone(), table);
        }
        for (rel, text) in written {
            self.emit(outputs, &rel, &text)?;
        }
        self.state.records = records;
        self.state.stratified = tables;
        Ok(())
    }

    fn stage_human(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let h = self.config.human.as_ref().expect("enabled");
        let scores = formats::load_human_scores(&self.input(self.config.inputs.human_scores.as_ref().expect("validated")))?;
        let axes: Vec<Axis> = h.axes.iter().map(|a| axis(a)).collect::<Result<_>>()?;
        let edges = self
            .config
            .word_eval
            .as_ref()
            .map(|w| w.freq_edges.clone())
            .unwrap_or_else(freq_edges);
        let records = self.state.records.get(&h.system).map(Vec::as_slice).unwrap_or(&[]);
        let agg = aggregate_human_scores(&scores, records, &axes, &edges)?;
        if !agg.unmatched.is_empty() {
            log::warn!("{} human scores matched no word record", agg.unmatched.len());
        }
        self.emit(outputs, "human/human.csv", &report::human_csv(&agg)?)?;
        self.emit(outputs, "human/human.json", &report::json(&agg)?)?;
        self.state.human = Some(agg);
        Ok(())
    }

    fn stage_metrics(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        self.reference()?;
        self.load_systems()?;
        let reference = self.state.reference.as_deref().unwrap_or(&[]);
        let mut written = Vec::new();
        for (name, hyp) in &self.state.systems {
            let m = ops::sentence_metrics(reference, hyp)?;
            written.push((format!("metrics/{name}.csv"), report::metrics_csv(&m)?));
            self.state.metrics.insert(name.clone(), ops::metric_columns(&m));
        }
        for (rel, text) in written {
            self.emit(outputs, &rel, &text)?;
        }
        Ok(())
    }

    fn stage_predictors(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let p = self.config.predictors.as_ref().expect("enabled");
        let source = match &self.config.inputs.source {
            Some(s) => Some(formats::load_corpus(&self.input(s))?),
            None => None,
        };
        let morph = match &p.morph_model {
            Some(m) => Some(self.model(m)? as &dyn Segmenter),
            None => None,
        };
        let table = build_predictor_table(
            &p.kind,
            self.state.reference.as_deref().unwrap_or(&[]),
            source.as_deref(),
            morph,
            &self.named(&p.subwords)?,
            &self.named(&p.src_subwords)?,
            self.state.projection.as_ref(),
        )?;
        let mut written = Vec::new();
        let mut tables = BTreeMap::new();
        for (name, responses) in &self.state.metrics {
            written.push((format!("predictors/{name}.csv"), report::predictors_csv(&table, responses)?));
            tables.insert(name.clone(), table.clone());
        }
        for (rel, text) in written {
            self.emit(outputs, &rel, &text)?;
        }
        self.state.predictors = tables;
        Ok(())
    }

    fn stage_fit(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let f = self.config.fit.as_ref().expect("enabled");
        let options = FitOptions {
            predictors: f.predictors.clone(),
            standardize: f.standardize,
            alpha: f.alpha,
            bonferroni: f.bonferroni,
            marginal: f.marginal,
        };
        // (system, metric) fits are independent
        let per_system: Vec<(String, Vec<FitReport>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .state
                .predictors
                .iter()
                .map(|(name, table)| {
                    let responses = &self.state.metrics[name];
                    let options = &options;
                    (name.clone(), scope.spawn(move || ops::fit_reports(name, table, responses, options)))
                })
                .collect();
            handles
                .into_iter()
                .map(|(n, h)| (n, h.join().expect("fit thread panicked")))
                .collect()
        });
        let mut all = Vec::new();
        for (name, reports) in per_system {
            self.emit(outputs, &format!("fit/{name}.json"), &report::json(&reports)?)?;
            all.extend(reports);
        }
        self.emit(outputs, "fit/reports.json", &report::json(&all)?)?;
        self.emit(outputs, "fit/significance.csv", &report::significance_grid_csv(&all)?)?;
        let failed: Vec<&FitReport> = all.iter().filter(|r| r.fit.is_none()).collect();
        self.state.fits = all.clone();
        if !all.is_empty() && failed.len() == all.len() {
            return Err(Error::Numerical(format!(
                "no model could be fitted: {}",
                failed[0].error.clone().unwrap_or_default()
            )));
        }
        Ok(())
    }

    fn stage_chart(&mut self, outputs: &mut Vec<String>) -> Result<()> {
        let mut written = Vec::new();
        for (name, table) in &self.state.stratified {
            let svg = render_chart(ChartData::Stratified(table), Style::GroupedBars)?;
            written.push((format!("charts/{name}_stratified.svg"), svg));
        }
        if let Some(h) = &self.state.human {
            written.push((String::from("charts/human.svg"), render_chart(ChartData::Human(h), Style::Bubble)?));
        }
        if !self.state.fits.is_empty() {
            let svg = render_chart(ChartData::Significance(&self.state.fits), Style::Grid)?;
            written.push((String::from("charts/significance.svg"), svg));
        }
        if written.is_empty() {
            return Err(Error::Config(String::from("chart stage has nothing to draw")));
        }
        for (rel, text) in written {
            self.emit(outputs, &rel, &text)?;
        }
        Ok(())
    }
}
