//! Times the engine over the three-point heavy-tempering grid and prints
//! bench.csv to stdout.

use std::time::Duration;

use fptsim::validation::{bench, fig3_grid, write_bench_csv};

fn main() -> fptsim::Result<()> {
    let rows = bench(&fig3_grid(200), 42, Duration::from_secs(120))?;
    write_bench_csv(&rows, std::io::stdout())?;
    for r in rows.iter().filter(|r| !r.complete) {
        eprintln!("alpha = {}, q = {} stopped after {} draws", r.alpha, r.q, r.n);
    }
    Ok(())
}
