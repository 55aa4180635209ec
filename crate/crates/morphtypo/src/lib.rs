//! File formats, reports, charts and the command-line pipeline around
//! [`morphtypo_core`].

pub mod chart;
pub mod cli;
pub mod error;
pub mod formats;
pub mod ops;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use morphtypo_core as core;
