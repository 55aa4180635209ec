//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

// `ensure!(a < b)` negates the comparison on purpose so NaN fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod aligner;
mod golden;
mod indices;
mod metrics;
mod nw;
mod segmenters;
mod stats;
mod stratify;

use std::panic;
use std::time::{Duration, Instant};

/// A criterion returns `Err` (or panics) on failure.
pub type Outcome = Result<(), String>;

#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: "1", name: "fusion golden values", budget: Duration::from_secs(1), run: indices::golden_values },
        Criterion { id: "2", name: "joint-counting sub-tallies", budget: Duration::from_secs(1), run: indices::sub_tallies },
        Criterion { id: "3", name: "NW alignment optimality (exhaustive)", budget: Duration::from_secs(10), run: nw::optimality },
        Criterion { id: "4", name: "segmenter invariants", budget: Duration::from_secs(60), run: segmenters::invariants },
        Criterion { id: "5", name: "over-splitting direction", budget: Duration::from_secs(60), run: segmenters::over_splitting },
        Criterion { id: "6", name: "IBM-1 dictionary recovery", budget: Duration::from_secs(30), run: aligner::dictionary },
        Criterion { id: "7", name: "sentence metrics", budget: Duration::from_secs(10), run: metrics::identity_and_fixtures },
        Criterion { id: "8", name: "OLS calibration", budget: Duration::from_secs(30), run: stats::calibration },
        Criterion { id: "9", name: "stratification", budget: Duration::from_secs(10), run: stratify::stratification },
        Criterion { id: "10", name: "end-to-end golden run", budget: Duration::from_secs(120), run: golden::end_to_end },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == c.id || c.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = match panic::catch_unwind(c.run) {
            Ok(r) => r,
            Err(payload) => Err(payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| String::from("panicked"))),
        };
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            if elapsed > c.budget {
                Err(format!("took {elapsed:.2?}, budget {:?}", c.budget))
            } else {
                Ok(())
            }
        });
        match &result {
            Ok(()) => println!("criterion {:>2} {:<40} PASS ({elapsed:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {:<40} FAIL ({elapsed:.2?}): {why}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
