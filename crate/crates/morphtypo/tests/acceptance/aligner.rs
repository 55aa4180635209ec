use morphtypo_core::aligner::{align_sentence, train_ibm1_traced, AlignOptions, Ibm1Params, SentencePair};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, Outcome};

pub fn dictionary() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let src: Vec<String> = (0..50).map(|i| format!("s{i:02}")).collect();
    let tgt: Vec<String> = (0..50).map(|i| format!("t{i:02}")).collect();
    let indices: Vec<usize> = (0..50).collect();

    let mut pairs: Vec<SentencePair> = Vec::new();
    let mut sources: Vec<Vec<String>> = Vec::new();
    for _ in 0..100 {
        let k = rng.random_range(3..=8);
        let chosen: Vec<usize> = indices.choose_multiple(&mut rng, k).copied().collect();
        let s: Vec<String> = chosen.iter().map(|&i| src[i].clone()).collect();
        let mut t: Vec<String> = chosen.iter().map(|&i| tgt[i].clone()).collect();
        t.shuffle(&mut rng);
        sources.push(s.clone());
        pairs.push((s, t));
    }
    let params = Ibm1Params { iterations: 5, lowercase: true };
    let (table, trace) = train_ibm1_traced(&pairs, &params).map_err(|e| e.to_string())?;

    let mut recovered = 0;
    for (s, t) in src.iter().zip(&tgt) {
        match table.best_target(s) {
            Some((best, _)) if best == t => recovered += 1,
            other => return Err(format!("{s}: best target {other:?}, expected {t}")),
        }
    }
    ensure!(recovered == 50, "recovered {recovered}/50");

    ensure!(trace.log_likelihood.len() == 5, "{} likelihood entries", trace.log_likelihood.len());
    for w in trace.log_likelihood.windows(2) {
        ensure!(w[1] >= w[0] - 1e-9, "log-likelihood fell {} -> {}", w[0], w[1]);
    }

    let same: Vec<SentencePair> = sources.iter().map(|s| (s.clone(), s.clone())).collect();
    let (fwd, _) = train_ibm1_traced(&same, &params).map_err(|e| e.to_string())?;
    let (rev, _) = train_ibm1_traced(&same, &params).map_err(|e| e.to_string())?;
    for (i, s) in sources.iter().enumerate() {
        let a = align_sentence(&fwd, &rev, i, s, s, AlignOptions::default());
        let identity: std::collections::BTreeSet<(usize, usize)> = (0..s.len()).map(|j| (j, j)).collect();
        ensure!(a.links == identity, "sentence {i}: links {:?}", a.links);
    }
    Ok(())
}
