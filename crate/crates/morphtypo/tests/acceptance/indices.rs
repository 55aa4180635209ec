use morphtypo_core::indices::{fusion_text, fusion_word, word_joints, MorphFeatureProfile, MorphRecord};

use crate::{ensure, Outcome};

fn profile(parts: &[(&str, u32, bool)]) -> MorphFeatureProfile {
    MorphFeatureProfile::new(parts.iter().map(|&(m, f, r)| MorphRecord::new(m, f, r)).collect()).expect("valid profile")
}

fn hablaremos() -> MorphFeatureProfile {
    profile(&[("habl", 0, true), ("are", 2, false), ("mos", 2, false)])
}

fn condeno() -> MorphFeatureProfile {
    profile(&[("conden", 0, true), ("ó", 5, false)])
}

fn apoyada() -> MorphFeatureProfile {
    profile(&[("apoy", 0, true), ("ada", 3, false)])
}

const PASSAGE: &str = "The company-'s great break-through came.PAST when they decid-ed to buy trike-s \
                       to sell their ice cream around the street-s in the nine-teen twenty-s";

/// Hyphens separate a root from affixes carrying one feature each; `.X`
/// marks a feature fused into the preceding morph.
fn passage_profiles() -> Vec<MorphFeatureProfile> {
    PASSAGE
        .split_whitespace()
        .map(|word| {
            let mut morphs = Vec::new();
            for (i, piece) in word.split('-').enumerate() {
                let mut parts = piece.split('.');
                let form = parts.next().unwrap_or_default();
                let fused = parts.count() as u32;
                let features = if i == 0 { fused } else { 1 + fused };
                morphs.push(MorphRecord::new(form, features, i == 0));
            }
            MorphFeatureProfile::new(morphs).expect("valid profile")
        })
        .collect()
}

pub fn golden_values() -> Outcome {
    let cases = [
        ("hablaremos", hablaremos(), 0.5),
        ("condenó", condeno(), 0.8),
        ("apoyada", apoyada(), 2.0 / 3.0),
    ];
    for (word, p, expected) in cases {
        ensure!(p.word() == word, "profile spells {:?}", p.word());
        let f = fusion_word(&p).value;
        ensure!((f - expected).abs() < 1e-12, "{word}: fusion {f}, expected {expected}");
    }
    let (_, text) = fusion_text(&passage_profiles());
    ensure!(text.value == 0.125, "passage fusion {}, expected 1/8", text.value);
    Ok(())
}

pub fn sub_tallies() -> Outcome {
    // per-morph fusional contributions of hablaremos: 0 + (2-1) + (2-1)
    let contributions: Vec<u32> = hablaremos().morphs().iter().map(|m| m.load().saturating_sub(1)).collect();
    ensure!(contributions == [0, 1, 1], "hablaremos contributions {contributions:?}");
    let h = word_joints(&hablaremos());
    ensure!(h.fusional_joints == 2, "hablaremos fusional joints {}", h.fusional_joints);
    ensure!(h.explicit_boundaries == 2 && h.total() == 4, "hablaremos total joints {}", h.total());

    let c = word_joints(&condeno());
    ensure!(c.fusional_joints == 4, "condenó fusional joints {}", c.fusional_joints);
    ensure!(c.explicit_boundaries == 1, "condenó explicit boundaries {}", c.explicit_boundaries);
    ensure!(c.total() == 5, "condenó total joints {}", c.total());

    let a = word_joints(&apoyada());
    ensure!((a.fusional_joints, a.total()) == (2, 3), "apoyada joints {a:?}");

    let (t, _) = fusion_text(&passage_profiles());
    ensure!(t.fusional_joints == 1, "passage fusional joints {}", t.fusional_joints);
    ensure!(t.explicit_boundaries == 7, "passage explicit boundaries {}", t.explicit_boundaries);
    ensure!(t.total() == 8, "passage total joints {}", t.total());
    Ok(())
}
