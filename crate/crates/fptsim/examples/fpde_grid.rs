//! Monte Carlo solution of a time-fractional PDE driven by a two-dimensional
//! Ornstein–Uhlenbeck generator, u(t, x) = E φ(X_{T}) with T the first
//! passage of the clock subordinator over t, on the grid {−1, 0, 1}².

use std::sync::Arc;

use fptsim::fpde::{default_grid, fpde_estimate, FpdeProblem};
use fptsim::model::EngineConfig;
use fptsim::RngStream;

fn main() -> fptsim::Result<()> {
    let problem = FpdeProblem::new(5.0)?;
    let rows = fpde_estimate(&problem, &default_grid(), 4000, &EngineConfig::default(), &RngStream::new(1))?;
    println!("{:>5} {:>5} {:>10} {:>10} {:>14}", "x1", "x2", "estimate", "± 95%", "conditioned");
    for r in &rows {
        println!("{:>5} {:>5} {:>10.4} {:>10.4} {:>14.4}", r.x1, r.x2, r.estimate, r.ci_half_width, r.rao_blackwell);
    }

    // a source term g(s, x) = |x|² accumulated along the path
    let with_source = FpdeProblem::new(1.0)?.with_source(Arc::new(|_, x| x[0] * x[0] + x[1] * x[1]));
    let rows = fpde_estimate(&with_source, &[[0.0, 0.0]], 2000, &EngineConfig::default(), &RngStream::new(2))?;
    println!("with source at the origin: {:.4} ± {:.4}", rows[0].estimate, rows[0].ci_half_width);
    Ok(())
}
