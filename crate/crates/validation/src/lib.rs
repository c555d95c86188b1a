//! Runner for criterion-style checks: one PASS/FAIL line each, nonzero exit
//! status if any fails.

use std::time::{Duration, Instant};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

/// A named check.
pub type Check = (&'static str, fn() -> Outcome);

pub fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Runs every check in order and returns the number of failures.
pub fn run_all(criteria: &[Check]) -> usize {
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failures += 1;
        }
        println!("{tag} {:>2} {name}: {} [{:.2?}]", i + 1, o.detail, start.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    failures
}
