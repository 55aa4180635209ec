//! Deterministic SVG rendering of stratified accuracy tables (grouped bars),
//! human-score histograms (bubbles) and significance overviews (grid).

use std::collections::BTreeMap;
use std::fmt::Write;

use morphtypo_core::word_eval::{HumanAggregation, StratifiedTable};

use crate::error::{Error, Result};
use crate::report::{num, significance_grid, FitReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    GroupedBars,
    Bubble,
    Grid,
}

impl std::str::FromStr for Style {
    type Err = Error;

    fn from_str(s: &str) -> Result<Style> {
        match s {
            "grouped-bars" => Ok(Style::GroupedBars),
            "bubble" => Ok(Style::Bubble),
            "grid" => Ok(Style::Grid),
            other => Err(Error::Input(format!(
                "unknown chart style {other:?} (grouped-bars, bubble, grid)"
            ))),
        }
    }
}

pub enum ChartData<'a> {
    Stratified(&'a StratifiedTable),
    Human(&'a HumanAggregation),
    Significance(&'a [FitReport]),
}

const PALETTE: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];
const ZERO_ACC: &str = "#ff7f0e";

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#888\" stroke-width=\"2\"/></pattern></defs>\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

pub fn render_chart(data: ChartData<'_>, style: Style) -> Result<String> {
    match (data, style) {
        (ChartData::Stratified(t), Style::GroupedBars) => grouped_bars(t),
        (ChartData::Human(h), Style::Bubble) => bubbles(h),
        (ChartData::Significance(r), Style::Grid) => grid(r),
        (_, style) => Err(Error::Input(format!(
            "chart style {style:?} does not fit this report"
        ))),
    }
}

/// Bars per first-axis value, one series per combination of the remaining
/// axes. Suppressed cells are drawn as hatched outlines without height.
fn grouped_bars(table: &StratifiedTable) -> Result<String> {
    if table.cells.is_empty() {
        return Err(Error::Input(String::from("empty stratified report")));
    }
    let mut groups: Vec<&str> = Vec::new();
    let mut series: Vec<String> = Vec::new();
    for c in &table.cells {
        if !groups.contains(&c.labels[0].as_str()) {
            groups.push(&c.labels[0]);
        }
        let s = c.labels[1..].join(" / ");
        if !series.contains(&s) {
            series.push(s);
        }
    }
    let (bar_w, gap, plot_h, left, top) = (28.0, 24.0, 240.0, 60.0, 30.0);
    let group_w = series.len() as f64 * bar_w + gap;
    let legend_h = if series.len() > 1 { 18.0 * series.len() as f64 } else { 0.0 };
    let width = left + groups.len() as f64 * group_w + 20.0;
    let height = top + plot_h + 50.0 + legend_h;
    let bottom = top + plot_h;
    let mut svg = header(width.max(240.0), height);
    let axes: Vec<&str> = table.axes.iter().map(|a| a.name()).collect();
    let _ = writeln!(
        svg,
        "<text x=\"{left}\" y=\"18\" font-size=\"13\">mean accuracy by {}</text>",
        esc(&axes.join(" x "))
    );
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let y = bottom - v * plot_h;
        let _ = writeln!(
            svg,
            "<line x1=\"{left}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v:.2}</text>",
            width - 20.0,
            left - 6.0,
            y + 4.0
        );
    }
    for c in &table.cells {
        let g = groups.iter().position(|x| *x == c.labels[0]).unwrap_or(0);
        let s = series.iter().position(|x| *x == c.labels[1..].join(" / ")).unwrap_or(0);
        let x = left + gap / 2.0 + g as f64 * group_w + s as f64 * bar_w;
        match c.mean_accuracy {
            Some(m) => {
                let h = m * plot_h;
                let _ = writeln!(
                    svg,
                    "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"{}\"><title>{} n={} mean={}</title></rect>",
                    bottom - h,
                    bar_w - 2.0,
                    PALETTE[s % PALETTE.len()],
                    esc(&c.labels.join(" / ")),
                    c.n,
                    num(m)
                );
                let _ = writeln!(
                    svg,
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"9\">{}</text>",
                    x + bar_w / 2.0 - 1.0,
                    bottom - h - 3.0,
                    c.n
                );
            }
            None => {
                let _ = writeln!(
                    svg,
                    "<rect class=\"suppressed\" x=\"{x:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{plot_h:.2}\" fill=\"url(#hatch)\" fill-opacity=\"0.5\" stroke=\"#888\"><title>{} n={} suppressed</title></rect>",
                    bar_w - 2.0,
                    esc(&c.labels.join(" / ")),
                    c.n
                );
                let _ = writeln!(
                    svg,
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"9\">{}</text>",
                    x + bar_w / 2.0 - 1.0,
                    bottom - 4.0,
                    c.n
                );
            }
        }
    }
    for (g, label) in groups.iter().enumerate() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            left + g as f64 * group_w + group_w / 2.0,
            bottom + 16.0,
            esc(label)
        );
    }
    if series.len() > 1 {
        for (s, label) in series.iter().enumerate() {
            let y = bottom + 36.0 + 18.0 * s as f64;
            let _ = writeln!(
                svg,
                "<rect x=\"{left}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{}\"/><text x=\"{:.2}\" y=\"{y:.2}\">{}</text>",
                y - 10.0,
                PALETTE[s % PALETTE.len()],
                left + 18.0,
                esc(label)
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// One column per stratum and one row per score value, for the semantic and
/// grammar scales. Outer bubbles scale with the count, inner bubbles with the
/// zero-accuracy overlap.
fn bubbles(agg: &HumanAggregation) -> Result<String> {
    if agg.strata.is_empty() {
        return Err(Error::Input(String::from("empty human-score report")));
    }
    let max = agg
        .strata
        .iter()
        .flat_map(|s| s.histogram.semantic.iter().chain(&s.histogram.grammar))
        .copied()
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let (cell, left, top, max_r) = (56.0, 90.0, 40.0, 24.0);
    let cols = agg.strata.len() as f64;
    let width = left + cols * cell + 20.0;
    let height = top + 8.0 * cell + 20.0;
    let mut svg = header(width, height);
    let _ = writeln!(svg, "<text x=\"{left}\" y=\"20\" font-size=\"13\">human scores</text>");
    let mut y0 = top;
    let scales: [(&str, usize); 2] = [("semantic", 4), ("grammar", 3)];
    for (scale, levels) in scales {
        for level in (1..=levels).rev() {
            let y = y0 + (levels - level) as f64 * cell + cell / 2.0;
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{scale} {level}</text>",
                left - 8.0,
                y + 4.0
            );
            for (i, s) in agg.strata.iter().enumerate() {
                let (counts, zero): (&[u64], &[u64]) = if scale == "semantic" {
                    (&s.histogram.semantic, &s.histogram.semantic_zero_accuracy)
                } else {
                    (&s.histogram.grammar, &s.histogram.grammar_zero_accuracy)
                };
                let (c, z) = (counts[level - 1], zero[level - 1]);
                let x = left + i as f64 * cell + cell / 2.0;
                let r = max_r * (c as f64 / max).sqrt();
                let rz = max_r * (z as f64 / max).sqrt();
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"#4c72b0\" fill-opacity=\"0.6\"><title>{} {scale}={level} count={c} zero_accuracy={z}</title></circle>",
                    esc(&s.labels.join(" / "))
                );
                if z > 0 {
                    let _ = writeln!(
                        svg,
                        "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{rz:.2}\" fill=\"{ZERO_ACC}\"/>"
                    );
                }
            }
        }
        y0 += levels as f64 * cell + cell / 2.0;
    }
    for (i, s) in agg.strata.iter().enumerate() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            left + i as f64 * cell + cell / 2.0,
            top - 6.0,
            esc(&s.labels.join(" / "))
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Rows per (system, metric), columns per predictor; significant cells get a
/// circle coloured by sign and sized by |t|.
fn grid(reports: &[FitReport]) -> Result<String> {
    let (predictors, rows) = significance_grid(reports);
    if rows.is_empty() || predictors.is_empty() {
        return Err(Error::Input(String::from("empty significance report")));
    }
    let max_t = rows
        .values()
        .flat_map(BTreeMap::values)
        .map(|t| t.abs())
        .filter(|t| t.is_finite())
        .fold(0.0, f64::max)
        .max(1.0);
    let (cell, left, top) = (36.0, 140.0, 130.0);
    let width = left + predictors.len() as f64 * cell + 20.0;
    let height = top + rows.len() as f64 * cell + 20.0;
    let mut svg = header(width, height);
    for (j, p) in predictors.iter().enumerate() {
        let x = left + j as f64 * cell + cell / 2.0;
        let _ = writeln!(
            svg,
            "<text transform=\"translate({x:.2},{:.2}) rotate(-60)\">{}</text>",
            top - 6.0,
            esc(p)
        );
    }
    for (i, ((system, metric), cells)) in rows.iter().enumerate() {
        let y = top + i as f64 * cell + cell / 2.0;
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{} {}</text>",
            left - 8.0,
            y + 4.0,
            esc(system),
            esc(metric)
        );
        for (j, p) in predictors.iter().enumerate() {
            let x = left + j as f64 * cell;
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{cell}\" height=\"{cell}\" fill=\"none\" stroke=\"#ddd\"/>",
                y - cell / 2.0
            );
            if let Some(&t) = cells.get(p) {
                let r = 4.0 + 12.0 * (t.abs().min(max_t) / max_t);
                let color = if t > 0.0 { "#4c72b0" } else { "#c44e52" };
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"{color}\"><title>{} {} {} t={}</title></circle>",
                    x + cell / 2.0,
                    esc(system),
                    esc(metric),
                    esc(p),
                    num(t)
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use morphtypo_core::corpus::DEFAULT_FREQ_EDGES;
    use morphtypo_core::word_eval::{stratify, Axis, WordRecord};

    fn records(n: usize, morphs: usize) -> Vec<WordRecord> {
        (0..n)
            .map(|i| WordRecord {
                sentence: i,
                token: 0,
                surface: String::from("x"),
                pos: String::from("NOUN"),
                morph_count: Some(morphs),
                fusion: None,
                train_freq: 0,
                in_vocab: false,
                accuracy: (i % 2) as u8,
                aligned_hyp_surface: String::new(),
            })
            .collect()
    }

    #[test]
    fn suppressed_cells_are_hatched_without_height() {
        let mut recs = records(40, 1);
        recs.extend(records(29, 3));
        let t = stratify(&recs, &[Axis::MorphCount], 30, &DEFAULT_FREQ_EDGES).unwrap();
        let svg = render_chart(ChartData::Stratified(&t), Style::GroupedBars).unwrap();
        assert_eq!(svg.matches("class=\"suppressed\"").count(), 1);
        assert!(svg.contains("n=29 suppressed"));
        assert!(svg.contains("mean=0.5"));
        let again = render_chart(ChartData::Stratified(&t), Style::GroupedBars).unwrap();
        assert_eq!(svg, again);
    }

    #[test]
    fn empty_and_unknown() {
        let t = stratify(&[], &[Axis::MorphCount], 30, &DEFAULT_FREQ_EDGES).unwrap();
        assert!(render_chart(ChartData::Stratified(&t), Style::GroupedBars).is_err());
        assert!("pie".parse::<Style>().is_err());
        assert!(render_chart(ChartData::Stratified(&t), Style::Grid).is_err());
    }
}
