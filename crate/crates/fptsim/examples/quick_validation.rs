//! Runs the quick validation suite and prints one line per check.

use fptsim::validation::{run_suite, Suite};

fn main() {
    for (name, outcome) in run_suite(Suite::Quick, 1) {
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {name}: {}", outcome.detail);
    }
}
