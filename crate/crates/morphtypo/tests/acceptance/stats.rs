use morphtypo_core::stats::fit_ols;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{ensure, Outcome};

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("x{i}")).collect()
}

pub fn calibration() -> Outcome {
    // exact fit y = 2 + 3 x0 - 0.5 x1 + 0.25 x2
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
    let y: Vec<f64> = x.iter().map(|r| 2.0 + 3.0 * r[0] - 0.5 * r[1] + 0.25 * r[2]).collect();
    let fit = fit_ols(&names(3), &x, &y, false).map_err(|e| e.to_string())?;
    ensure!((fit.intercept.estimate - 2.0).abs() < 1e-9, "intercept {}", fit.intercept.estimate);
    for (c, want) in fit.coefficients.iter().zip([3.0, -0.5, 0.25]) {
        ensure!((c.estimate - want).abs() < 1e-9, "{}: {} expected {want}", c.name, c.estimate);
    }
    ensure!((fit.r_squared - 1.0).abs() < 1e-9, "R² {}", fit.r_squared);

    // planted strong and null predictors
    let (mut strong_hits, mut null_quiet) = (0, 0);
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let n = 100;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)])
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| {
                let e: f64 = StandardNormal.sample(&mut rng);
                1.0 + 0.8 * r[0] + e
            })
            .collect();
        let fit = fit_ols(&names(2), &x, &y, true).map_err(|e| e.to_string())?;
        strong_hits += usize::from(fit.coefficients[0].p < 0.05);
        null_quiet += usize::from(fit.coefficients[1].p >= 0.05);
    }
    ensure!(strong_hits >= 95, "strong predictor significant in {strong_hits}/100");
    ensure!(null_quiet >= 90, "null predictor non-significant in {null_quiet}/100");

    // t and p do not depend on predictor scaling
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x: Vec<Vec<f64>> = (0..60)
        .map(|_| vec![rng.random_range(0.0..1000.0), rng.random_range(-0.01..0.01), rng.random_range(0.0..3.0)])
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|r| {
            let e: f64 = StandardNormal.sample(&mut rng);
            0.002 * r[0] + 40.0 * r[1] + e
        })
        .collect();
    let raw = fit_ols(&names(3), &x, &y, false).map_err(|e| e.to_string())?;
    let std = fit_ols(&names(3), &x, &y, true).map_err(|e| e.to_string())?;
    for (a, b) in raw.coefficients.iter().zip(&std.coefficients) {
        ensure!((a.t - b.t).abs() < 1e-9, "{}: t {} vs {}", a.name, a.t, b.t);
        ensure!((a.p - b.p).abs() < 1e-9, "{}: p {} vs {}", a.name, a.p, b.p);
    }
    ensure!((raw.r_squared - std.r_squared).abs() < 1e-9, "R² changed under standardization");
    Ok(())
}
