use std::fs;

use morphtypo::formats::{
    load_alignment_pharaoh, load_annotation_sheet, load_gold_segmentations, render_annotation_sheet, render_pharaoh,
    render_segmentations,
};
use morphtypo_core::aligner::SentenceAlignment;
use morphtypo_core::fusion_annotation::SheetRow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn gold_tsv_round_trip_and_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gold.tsv");
    fs::write(
        &path,
        "# comment\nhablamos\thabl a mos\ncasa\tcasa\nmal\tma x\nsin-tab\ncasa\tca sa\n",
    )
    .unwrap();
    let (lex, rejected) = load_gold_segmentations(&path, &[]).unwrap();
    assert_eq!(lex.len(), 2);
    let lines: Vec<usize> = rejected.iter().map(|r| r.line).collect();
    assert_eq!(lines, [4, 5, 6]);

    let again = dir.path().join("again.tsv");
    fs::write(&again, render_segmentations(lex.iter())).unwrap();
    let (lex2, rejected2) = load_gold_segmentations(&again, &[]).unwrap();
    assert!(rejected2.is_empty());
    assert_eq!(lex2.iter().collect::<Vec<_>>(), lex.iter().collect::<Vec<_>>());
}

#[test]
fn pharaoh_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut alignments = Vec::new();
    let mut lengths = Vec::new();
    for s in 0..100 {
        let (rl, hl) = (rng.random_range(1..15), rng.random_range(1..15));
        let links: Vec<(usize, usize)> = (0..rng.random_range(0..20))
            .map(|_| (rng.random_range(0..rl), rng.random_range(0..hl)))
            .collect();
        alignments.push(SentenceAlignment::new(s, links));
        lengths.push((rl, hl));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.pharaoh");
    fs::write(&path, render_pharaoh(&alignments)).unwrap();
    assert_eq!(load_alignment_pharaoh(&path, &lengths).unwrap(), alignments);

    // a link past the sentence end is rejected with its line number
    let mut short = lengths.clone();
    let bad = alignments.iter().position(|a| !a.links.is_empty()).unwrap();
    short[bad] = (0, 0);
    let err = load_alignment_pharaoh(&path, &short).unwrap_err().to_string();
    assert!(err.contains(&format!(":{}:", bad + 1)), "{err}");
    assert!(load_alignment_pharaoh(&path, &lengths[..99]).is_err());
}

#[test]
fn sheet_emit_ingest_is_idempotent() {
    let rows = vec![
        SheetRow {
            paradigm_id: "P0001".into(),
            features: "1;FUT;IND;PL".into(),
            termination: "-ar".into(),
            sample_form: "hablaremos".into(),
            segmentation: "habl-are-mos".into(),
            per_morph_features: "0,2,2".into(),
            root_flags: "1,0,0".into(),
            fusion: Some("0.5".into()),
            lemma: None,
        },
        SheetRow {
            paradigm_id: "P0002".into(),
            features: "NFIN".into(),
            termination: "-er".into(),
            sample_form: "comer".into(),
            lemma: Some("comer".into()),
            ..SheetRow::default()
        },
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sheet.tsv");
    let text = render_annotation_sheet(&rows);
    fs::write(&path, &text).unwrap();
    let loaded = load_annotation_sheet(&path).unwrap();
    assert_eq!(loaded, rows);
    assert_eq!(render_annotation_sheet(&loaded), text);
}
