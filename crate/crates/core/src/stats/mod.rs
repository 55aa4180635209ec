//! Least-squares fits of per-sentence metric scores on typological
//! predictors, with t-test significance.

pub mod dist;
mod ols;

pub use dist::{regularized_incomplete_beta, t_two_sided_p};
pub use ols::{
    fit_linear_model, fit_marginal, fit_ols, significant_predictors, Coefficient,
    LinearModelFit, SignificantPredictor,
};
