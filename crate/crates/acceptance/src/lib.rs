//! Runs the acceptance criteria of `fptsim` and formats one line per criterion.
//!
//! This crate exists so that the `acceptance` test target runs after every
//! other test in the workspace.

use std::time::{Duration, Instant};

use fptsim::validation::{run_criterion, Outcome, Suite, CRITERIA};

pub struct Report {
    pub index: usize,
    pub name: &'static str,
    pub outcome: Outcome,
    pub elapsed: Duration,
}

impl Report {
    pub fn line(&self) -> String {
        let verdict = if self.outcome.pass { "PASS" } else { "FAIL" };
        format!(
            "criterion {:>2} {verdict} {}: {} [{:.1?}]",
            self.index + 1,
            self.name,
            self.outcome.detail,
            self.elapsed
        )
    }
}

/// Runs every criterion in order, calling `each` as soon as one finishes.
pub fn run_all(suite: Suite, seed: u64, mut each: impl FnMut(&Report)) -> Vec<Report> {
    (0..CRITERIA.len())
        .map(|index| {
            let start = Instant::now();
            let (name, outcome) = run_criterion(index, suite, seed);
            let r = Report { index, name, outcome, elapsed: start.elapsed() };
            each(&r);
            r
        })
        .collect()
}
