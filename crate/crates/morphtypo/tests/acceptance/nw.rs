use morphtypo_core::seg_eval::{nw_align, AlignParams};

use crate::{ensure, Outcome};

const ALPHABET: [&str; 3] = ["ka", "kan", "ler"];
const GAP: f64 = -0.5;

// Plain edit distance, kept separate from the library's.
fn edit(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn sub(a: &str, b: &str) -> f64 {
    let l = a.chars().count().max(b.chars().count());
    if l == 0 {
        1.0
    } else {
        1.0 - edit(a, b) as f64 / l as f64
    }
}

/// Best score over every alignment path, enumerated without memoisation.
fn brute(h: &[usize], g: &[usize], table: &[[f64; 3]; 3]) -> f64 {
    match (h.split_first(), g.split_first()) {
        (None, None) => 0.0,
        (Some(_), None) => GAP * h.len() as f64,
        (None, Some(_)) => GAP * g.len() as f64,
        (Some((&x, hr)), Some((&y, gr))) => {
            let diag = table[x][y] + brute(hr, gr, table);
            let up = GAP + brute(hr, g, table);
            let left = GAP + brute(h, gr, table);
            diag.max(up).max(left)
        }
    }
}

fn sequences(max_len: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for a in 0..ALPHABET.len() {
                let mut t = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn words(s: &[usize]) -> Vec<String> {
    s.iter().map(|&i| ALPHABET[i].to_string()).collect()
}

pub fn optimality() -> Outcome {
    let params = AlignParams { gap: GAP };
    let mut table = [[0.0; 3]; 3];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = sub(ALPHABET[i], ALPHABET[j]);
        }
    }
    let all = sequences(5);
    let as_words: Vec<Vec<String>> = all.iter().map(|s| words(s)).collect();
    let mut checked = 0usize;
    for (hi, h) in all.iter().enumerate() {
        for (gi, g) in all.iter().enumerate() {
            let (hw, gw) = (&as_words[hi], &as_words[gi]);
            let a = nw_align(hw, gw, &params);
            let best = brute(h, g, &table);
            ensure!((a.score - best).abs() < 1e-9, "{hw:?} vs {gw:?}: score {} but optimum {best}", a.score);
            let hyp: Vec<&String> = a.pairs.iter().filter_map(|p| p.hyp.as_ref()).collect();
            let gold: Vec<&String> = a.pairs.iter().filter_map(|p| p.gold.as_ref()).collect();
            ensure!(
                hyp.iter().copied().eq(hw.iter()) && gold.iter().copied().eq(gw.iter()),
                "{hw:?} vs {gw:?}: path does not reconstruct inputs"
            );
            let mut path = 0.0;
            for p in &a.pairs {
                path += match (&p.hyp, &p.gold) {
                    (Some(x), Some(y)) => sub(x, y),
                    (None, None) => return Err(format!("{hw:?} vs {gw:?}: empty column")),
                    _ => GAP,
                };
            }
            ensure!((path - a.score).abs() < 1e-9, "{hw:?} vs {gw:?}: path sums to {path}, reported {}", a.score);
            checked += 1;
        }
    }
    ensure!(checked == 364 * 364, "checked {checked} pairs");
    Ok(())
}
