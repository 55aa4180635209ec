//! CSV and JSON report emission. Numbers are written with Rust's shortest
//! round-trip float formatting so charts can quote them verbatim.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use morphtypo_core::fusion_annotation::Projection;
use morphtypo_core::indices::{FusionValue, JointTally, SynthesisSummary};
use morphtypo_core::predictors::PredictorTable;
use morphtypo_core::seg_eval::GroupedEval;
use morphtypo_core::stats::{LinearModelFit, SignificantPredictor};
use morphtypo_core::word_eval::{HumanAggregation, StratifiedTable, WordRecord};

use crate::error::Result;

pub fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_string(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// group, n, accuracy_count, precision
pub fn seg_eval_csv(eval: &GroupedEval) -> Result<String> {
    csv_string(
        &strings(&["group", "n", "accuracy_count", "precision"]),
        eval.groups.iter().map(|g| {
            vec![g.group.clone(), g.n.to_string(), opt(g.accuracy_count), opt(g.precision)]
        }),
    )
}

pub fn synthesis_csv(summary: &SynthesisSummary) -> Result<String> {
    csv_string(
        &strings(&["words", "morphs", "unsegmented", "synthesis"]),
        [vec![
            summary.words.to_string(),
            summary.morphs.to_string(),
            summary.unsegmented.to_string(),
            num(summary.synthesis),
        ]],
    )
}

/// Per-word joint tallies followed by a `TOTAL` row.
pub fn fusion_csv(words: &[(String, JointTally, FusionValue)], total: (JointTally, FusionValue)) -> Result<String> {
    let row = |w: &str, t: &JointTally, f: &FusionValue| {
        vec![
            w.to_owned(),
            t.fusional_joints.to_string(),
            t.explicit_boundaries.to_string(),
            t.total().to_string(),
            num(f.value),
            f.jointless.to_string(),
        ]
    };
    csv_string(
        &strings(&["word", "fusional_joints", "explicit_boundaries", "total_joints", "fusion", "jointless"]),
        words
            .iter()
            .map(|(w, t, f)| row(w, t, f))
            .chain(std::iter::once(row("TOTAL", &total.0, &total.1))),
    )
}

pub fn projection_csv(p: &Projection) -> Result<String> {
    csv_string(
        &strings(&["sentence_id", "token_index", "surface", "paradigm", "coverage", "fusion"]),
        p.tokens.iter().map(|t| {
            vec![
                t.sentence.to_string(),
                t.token.to_string(),
                t.surface.clone(),
                t.key.clone(),
                format!("{:?}", t.coverage).to_lowercase(),
                opt(t.fusion),
            ]
        }),
    )
}

pub fn records_csv(records: &[WordRecord]) -> Result<String> {
    csv_string(
        &strings(&[
            "sentence_id",
            "token_index",
            "surface",
            "pos",
            "morph_count",
            "fusion",
            "train_freq",
            "in_vocab",
            "accuracy",
            "aligned_hyp_surface",
        ]),
        records.iter().map(|r| {
            vec![
                r.sentence.to_string(),
                r.token.to_string(),
                r.surface.clone(),
                r.pos.clone(),
                r.morph_count.map(|m| m.to_string()).unwrap_or_default(),
                opt(r.fusion),
                r.train_freq.to_string(),
                r.in_vocab.to_string(),
                r.accuracy.to_string(),
                r.aligned_hyp_surface.clone(),
            ]
        }),
    )
}

/// One column per axis, then n, correct, mean_accuracy, suppressed.
pub fn stratified_csv(table: &StratifiedTable) -> Result<String> {
    let mut header: Vec<String> = table.axes.iter().map(|a| a.name().to_owned()).collect();
    header.extend(strings(&["n", "correct", "mean_accuracy", "suppressed"]));
    csv_string(
        &header,
        table.cells.iter().map(|c| {
            let mut row = c.labels.clone();
            row.extend([
                c.n.to_string(),
                c.correct.to_string(),
                opt(c.mean_accuracy),
                c.suppressed.to_string(),
            ]);
            row
        }),
    )
}

/// Long format: strata labels, scale, score, count, zero_accuracy.
pub fn human_csv(agg: &HumanAggregation) -> Result<String> {
    let mut header: Vec<String> = agg.axes.iter().map(|a| a.name().to_owned()).collect();
    header.extend(strings(&["scale", "score", "count", "zero_accuracy"]));
    let mut rows = Vec::new();
    for s in &agg.strata {
        let h = &s.histogram;
        let scales: [(&str, &[u64], &[u64]); 2] = [
            ("semantic", &h.semantic, &h.semantic_zero_accuracy),
            ("grammar", &h.grammar, &h.grammar_zero_accuracy),
        ];
        for (scale, counts, zero) in scales {
            for (i, (c, z)) in counts.iter().zip(zero).enumerate() {
                let mut row = s.labels.clone();
                row.extend([scale.to_owned(), (i + 1).to_string(), c.to_string(), z.to_string()]);
                rows.push(row);
            }
        }
    }
    csv_string(&header, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceMetrics {
    pub sentence: usize,
    pub bleu: f64,
    pub chrf: f64,
}

pub fn metrics_csv(rows: &[SentenceMetrics]) -> Result<String> {
    csv_string(
        &strings(&["sentence_id", "bleu", "chrf"]),
        rows.iter()
            .map(|m| vec![m.sentence.to_string(), num(m.bleu), num(m.chrf)]),
    )
}

/// sentence_id, predictor columns, then one column per response; missing
/// values are blank.
pub fn predictors_csv(table: &PredictorTable, responses: &BTreeMap<String, BTreeMap<usize, f64>>) -> Result<String> {
    let mut header = vec![String::from("sentence_id")];
    header.extend(table.columns.iter().cloned());
    header.extend(responses.keys().cloned());
    csv_string(
        &header,
        table.rows.iter().map(|(s, values)| {
            let mut row = vec![s.to_string()];
            row.extend(table.columns.iter().map(|c| opt(values.get(c).copied())));
            row.extend(responses.values().map(|r| opt(r.get(s).copied())));
            row
        }),
    )
}

/// One fitted model with its context, as written to the fit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub system: String,
    pub metric: String,
    pub mode: String,
    /// Predictor name for marginal fits.
    pub predictor: Option<String>,
    pub excluded_sentences: usize,
    pub fit: Option<LinearModelFit>,
    pub error: Option<String>,
    pub significant: Vec<SignificantPredictor>,
}

/// system, metric, then per predictor the t statistic when significant and
/// blank otherwise.
pub fn significance_grid_csv(reports: &[FitReport]) -> Result<String> {
    let (predictors, cells) = significance_grid(reports);
    let mut header = strings(&["system", "metric"]);
    header.extend(predictors.iter().cloned());
    csv_string(
        &header,
        cells.iter().map(|((system, metric), row)| {
            let mut out = vec![system.clone(), metric.clone()];
            out.extend(predictors.iter().map(|p| opt(row.get(p).copied())));
            out
        }),
    )
}

pub type GridRows = BTreeMap<(String, String), BTreeMap<String, f64>>;

/// All predictor names seen in the reports (first-seen order) and, per
/// (system, metric), the t statistics of significant predictors.
pub fn significance_grid(reports: &[FitReport]) -> (Vec<String>, GridRows) {
    let mut predictors: Vec<String> = Vec::new();
    let mut cells: GridRows = BTreeMap::new();
    for r in reports {
        if let Some(fit) = &r.fit {
            for c in &fit.coefficients {
                if !predictors.contains(&c.name) {
                    predictors.push(c.name.clone());
                }
            }
        }
        let row = cells.entry((r.system.clone(), r.metric.clone())).or_default();
        for s in &r.significant {
            row.insert(s.name.clone(), s.t);
        }
    }
    (predictors, cells)
}

fn read_csv(path: &std::path::Path) -> Result<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let text = crate::formats::read_string(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    let rows = r.records().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((headers, rows))
}

fn column(path: &std::path::Path, headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| crate::error::Error::parse(path, 1, format!("missing column {name:?}")))
}

fn cell<T: std::str::FromStr>(path: &std::path::Path, row: usize, rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| crate::error::Error::parse(path, row + 2, format!("bad value {raw:?}")))
}

fn opt_cell<T: std::str::FromStr>(path: &std::path::Path, row: usize, rec: &csv::StringRecord, i: usize) -> Result<Option<T>> {
    match rec.get(i).unwrap_or("") {
        "" => Ok(None),
        _ => cell(path, row, rec, i).map(Some),
    }
}

/// Reads a file written by [`records_csv`].
pub fn load_records_csv(path: &std::path::Path) -> Result<Vec<WordRecord>> {
    let (h, rows) = read_csv(path)?;
    let idx = |n: &str| column(path, &h, n);
    let (s, t, surf, pos, mc, fu, tf, iv, acc, hyp) = (
        idx("sentence_id")?,
        idx("token_index")?,
        idx("surface")?,
        idx("pos")?,
        idx("morph_count")?,
        idx("fusion")?,
        idx("train_freq")?,
        idx("in_vocab")?,
        idx("accuracy")?,
        idx("aligned_hyp_surface")?,
    );
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(WordRecord {
                sentence: cell(path, i, r, s)?,
                token: cell(path, i, r, t)?,
                surface: r.get(surf).unwrap_or("").to_owned(),
                pos: r.get(pos).unwrap_or("").to_owned(),
                morph_count: opt_cell(path, i, r, mc)?,
                fusion: opt_cell(path, i, r, fu)?,
                train_freq: cell(path, i, r, tf)?,
                in_vocab: cell(path, i, r, iv)?,
                accuracy: cell(path, i, r, acc)?,
                aligned_hyp_surface: r.get(hyp).unwrap_or("").to_owned(),
            })
        })
        .collect()
}

/// Reads a file written by [`projection_csv`] back into a projection.
pub fn load_projection_csv(path: &std::path::Path) -> Result<Projection> {
    use morphtypo_core::fusion_annotation::{Coverage, TokenFusion};
    let (h, rows) = read_csv(path)?;
    let idx = |n: &str| column(path, &h, n);
    let (s, t, surf, key, cov, fu) = (
        idx("sentence_id")?,
        idx("token_index")?,
        idx("surface")?,
        idx("paradigm")?,
        idx("coverage")?,
        idx("fusion")?,
    );
    let tokens = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let coverage = match r.get(cov).unwrap_or("") {
                "covered" => Coverage::Covered,
                "exception" => Coverage::Exception,
                _ => Coverage::Uncovered,
            };
            Ok(TokenFusion {
                sentence: cell(path, i, r, s)?,
                token: cell(path, i, r, t)?,
                surface: r.get(surf).unwrap_or("").to_owned(),
                key: r.get(key).unwrap_or("").to_owned(),
                coverage,
                fusion: opt_cell(path, i, r, fu)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Projection { tokens })
}

/// Reads a predictor CSV. Columns named in `responses` become response
/// maps; every other column except `sentence_id` is a predictor.
/// Response name -> sentence id -> score.
pub type ResponseColumns = BTreeMap<String, BTreeMap<usize, f64>>;

pub fn load_predictors_csv(path: &std::path::Path, responses: &[String]) -> Result<(PredictorTable, ResponseColumns)> {
    let (h, rows) = read_csv(path)?;
    let sid = column(path, &h, "sentence_id")?;
    for r in responses {
        column(path, &h, r)?;
    }
    let mut table = PredictorTable::new();
    let mut resp: BTreeMap<String, BTreeMap<usize, f64>> =
        responses.iter().map(|r| (r.clone(), BTreeMap::new())).collect();
    for (i, rec) in rows.iter().enumerate() {
        let sentence: usize = cell(path, i, rec, sid)?;
        let mut values = Vec::new();
        for (j, name) in h.iter().enumerate() {
            if j == sid {
                continue;
            }
            let Some(v) = opt_cell::<f64>(path, i, rec, j)? else {
                continue;
            };
            match resp.get_mut(name) {
                Some(m) => {
                    m.insert(sentence, v);
                }
                None => values.push((name.to_owned(), v)),
            }
        }
        table.push(sentence, Some(values));
    }
    // keep the file's column order even when the first row has gaps
    table.columns = h
        .iter()
        .enumerate()
        .filter(|(j, n)| *j != sid && !responses.iter().any(|r| r == n))
        .map(|(_, n)| n.to_owned())
        .collect();
    Ok((table, resp))
}
