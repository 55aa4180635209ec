use morphtypo_core::metrics::{sentence_bleu, sentence_chrf};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, Outcome};

fn close(name: &str, got: f64, want: f64) -> Outcome {
    ensure!((got - want).abs() < 1e-9, "{name}: {got}, expected {want}");
    Ok(())
}

pub fn identity_and_fixtures() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let vocab = ["casa", "perro", "el", "la", "corre", "rápido", "niñas", "ñu", "a", "de"];
    for i in 0..100 {
        let len = rng.random_range(1..=20);
        let words: Vec<&str> = (0..len).map(|_| *vocab.choose(&mut rng).unwrap()).collect();
        let text = words.join(" ");
        close(&format!("chrF identity {i}"), sentence_chrf(&text, &text, 6, 2.0).value, 100.0)?;
        close(&format!("BLEU identity {i}"), sentence_bleu(&words, &words, 4), 100.0)?;
    }

    // n=1: P 2/3 R 1; n=2: P 1/2 R 1; n=3: hyp only, F 0; n>3 absent
    let f1 = 5.0 * (2.0 / 3.0) / (4.0 * (2.0 / 3.0) + 1.0);
    let f2 = 5.0 * 0.5 / (4.0 * 0.5 + 1.0);
    close("chrF aab/ab", sentence_chrf("aab", "ab", 6, 2.0).value, 100.0 * (f1 + f2 + 0.0) / 3.0)?;
    close(
        "chrF abcd/abce",
        sentence_chrf("abcd", "abce", 6, 2.0).value,
        100.0 * (0.75 + 2.0 / 3.0 + 0.5 + 0.0) / 4.0,
    )?;

    let hyp: Vec<&str> = "the cat sat on the mat".split(' ').collect();
    let reference: Vec<&str> = "the cat is on the mat".split(' ').collect();
    let want = 100.0 * (5.0 / 6.0 * 4.0 / 6.0 * 2.0 / 5.0 * 1.0 / 4.0f64).powf(0.25);
    close("BLEU cat/mat", sentence_bleu(&hyp, &reference, 4), want)?;

    let want = 100.0 * (1.0 - 4.0 / 3.0f64).exp() * (2.0 / 3.0 * 2.0 / 3.0 * 1.0 / 2.0 * 1.0f64).powf(0.25);
    close("BLEU short", sentence_bleu(&["a", "a", "b"], &["a", "b", "c", "d"], 4), want)?;
    Ok(())
}
