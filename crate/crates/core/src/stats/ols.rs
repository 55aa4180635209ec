use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::dist::t_two_sided_p;
use crate::predictors::PredictorRow;
use crate::{Error, Result};

/// Relative size of a QR diagonal below which a column counts as collinear.
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModelFit {
    pub n: usize,
    pub dof: usize,
    pub standardized: bool,
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    /// Constant predictor columns removed before fitting.
    pub dropped_constant: Vec<String>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl LinearModelFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

fn is_constant(col: &[f64]) -> bool {
    let first = col[0];
    let scale = first.abs().max(1.0);
    col.iter().all(|v| (v - first).abs() <= 1e-12 * scale)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn zscore(col: &[f64]) -> Vec<f64> {
    let m = mean(col);
    let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (col.len() - 1) as f64;
    let sd = libm::sqrt(var);
    col.iter().map(|v| (v - m) / sd).collect()
}

/// Householder QR of the column-major `cols` (each of length n), applied in
/// place to `y`. Returns R as rows of the upper triangle.
fn householder(cols: &mut [Vec<f64>], y: &mut [f64]) -> Vec<Vec<f64>> {
    let n = y.len();
    let p = cols.len();
    for j in 0..p {
        let norm = libm::sqrt(cols[j][j..].iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            continue;
        }
        let alpha = if cols[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |target: &mut [f64]| {
            let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (t, vi) in target.iter_mut().zip(&v) {
                *t -= f * vi;
            }
        };
        for col in cols.iter_mut().skip(j) {
            reflect(&mut col[j..n]);
        }
        reflect(&mut y[j..n]);
    }
    (0..p)
        .map(|i| (0..p).map(|j| if j >= i { cols[j][i] } else { 0.0 }).collect())
        .collect()
}

/// Inverse of an upper-triangular matrix.
fn invert_upper(r: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = r.len();
    let mut inv = vec![vec![0.0; p]; p];
    for j in 0..p {
        inv[j][j] = 1.0 / r[j][j];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r[i][k] * inv[k][j]).sum();
            inv[i][j] = -s / r[i][i];
        }
    }
    inv
}

fn coefficient(name: String, estimate: f64, std_error: f64, dof: usize) -> Coefficient {
    let t = if std_error > 0.0 {
        estimate / std_error
    } else if estimate == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(estimate)
    };
    Coefficient {
        name,
        estimate,
        std_error,
        t,
        p: t_two_sided_p(t, dof as f64),
    }
}

/// Ordinary least squares of `y` on the predictor columns `x` (row-major,
/// one row per observation) plus an intercept. Constant columns are dropped;
/// with `standardize` the remaining predictors are z-scored.
pub fn fit_ols(names: &[String], x: &[Vec<f64>], y: &[f64], standardize: bool) -> Result<LinearModelFit> {
    let n = y.len();
    if x.len() != n || x.iter().any(|row| row.len() != names.len()) {
        return Err(Error::InvalidArgument(String::from(
            "design matrix shape does not match the response",
        )));
    }
    if n == 0 {
        return Err(Error::TooFewObservations { n, k: names.len() });
    }
    let mut kept_names = Vec::new();
    let mut dropped = Vec::new();
    let mut cols = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let col: Vec<f64> = x.iter().map(|row| row[j]).collect();
        if is_constant(&col) {
            dropped.push(name.clone());
        } else {
            kept_names.push(name.clone());
            cols.push(if standardize { zscore(&col) } else { col });
        }
    }
    if cols.is_empty() {
        return Err(Error::NoPredictors);
    }
    let k = cols.len();
    if n <= k + 1 {
        return Err(Error::TooFewObservations { n, k });
    }
    let dof = n - k - 1;

    let mut design = Vec::with_capacity(k + 1);
    design.push(vec![1.0; n]);
    design.extend(cols.iter().cloned());
    let col_norms: Vec<f64> = design
        .iter()
        .map(|c| libm::sqrt(c.iter().map(|v| v * v).sum()))
        .collect();
    let mut qr = design.clone();
    let mut qty = y.to_vec();
    let r = householder(&mut qr, &mut qty);
    let collinear: Vec<String> = (1..=k)
        .filter(|&j| r[j][j].abs() <= RANK_TOL * col_norms[j])
        .map(|j| kept_names[j - 1].clone())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::RankDeficient(collinear));
    }

    let p = k + 1;
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| r[i][j] * beta[j]).sum();
        beta[i] = (qty[i] - s) / r[i][i];
    }
    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - (0..p).map(|j| design[j][i] * beta[j]).sum::<f64>())
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let y_mean = mean(y);
    let tss: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let sigma2 = rss / dof as f64;
    let rinv = invert_upper(&r);
    let se: Vec<f64> = (0..p)
        .map(|i| libm::sqrt(sigma2 * rinv[i].iter().map(|v| v * v).sum::<f64>()))
        .collect();

    let intercept = coefficient(String::from("(intercept)"), beta[0], se[0], dof);
    let coefficients = kept_names
        .into_iter()
        .enumerate()
        .map(|(j, name)| coefficient(name, beta[j + 1], se[j + 1], dof))
        .collect();
    Ok(LinearModelFit {
        n,
        dof,
        standardized: standardize,
        intercept,
        coefficients,
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 1.0 },
        dropped_constant: dropped,
        residuals,
    })
}

fn shared_names(rows: &[PredictorRow]) -> Result<Vec<String>> {
    let first = rows
        .first()
        .ok_or(Error::TooFewObservations { n: 0, k: 0 })?;
    let names: Vec<String> = first.predictors.keys().cloned().collect();
    if rows
        .iter()
        .any(|r| r.predictors.len() != names.len() || !names.iter().all(|n| r.predictors.contains_key(n)))
    {
        return Err(Error::InvalidArgument(String::from(
            "rows do not share one predictor set",
        )));
    }
    Ok(names)
}

/// Joint model of the response on every predictor the rows carry.
pub fn fit_linear_model(rows: &[PredictorRow], standardize: bool) -> Result<LinearModelFit> {
    let names = shared_names(rows)?;
    let x: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| names.iter().map(|n| r.predictors[n]).collect())
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| r.response).collect();
    fit_ols(&names, &x, &y, standardize)
}

/// One single-predictor model per predictor.
pub fn fit_marginal(rows: &[PredictorRow], standardize: bool) -> Result<Vec<(String, Result<LinearModelFit>)>> {
    let names = shared_names(rows)?;
    let y: Vec<f64> = rows.iter().map(|r| r.response).collect();
    Ok(names
        .into_iter()
        .map(|name| {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.predictors[&name]]).collect();
            let fit = fit_ols(core::slice::from_ref(&name), &x, &y, standardize);
            (name, fit)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificantPredictor {
    pub name: String,
    pub coefficient: f64,
    pub positive: bool,
    pub t: f64,
    pub p: f64,
}

/// Predictors with `p < alpha` (or `alpha / k` under Bonferroni), by
/// decreasing |t|.
pub fn significant_predictors(fit: &LinearModelFit, alpha: f64, bonferroni: bool) -> Vec<SignificantPredictor> {
    let threshold = if bonferroni && !fit.coefficients.is_empty() {
        alpha / fit.coefficients.len() as f64
    } else {
        alpha
    };
    let mut out: Vec<SignificantPredictor> = fit
        .coefficients
        .iter()
        .filter(|c| c.p < threshold)
        .map(|c| SignificantPredictor {
            name: c.name.clone(),
            coefficient: c.estimate,
            positive: c.estimate > 0.0,
            t: c.t,
            p: c.p,
        })
        .collect();
    out.sort_by(|a, b| b.t.abs().total_cmp(&a.t.abs()).then_with(|| a.name.cmp(&b.name)));
    out
}
