//! Exact first passage of Z = Y + Q over a constant level: tempered stable
//! part with α = 0.75, ϑ = 2, q = 10 plus compound Poisson jumps of rate 1
//! with Exp(1) sizes.

use fptsim::engine::{default_fpts, Engine};
use fptsim::model::{Boundary, EngineConfig, FiniteMeasure, RPolicy, SubordinatorSpec};
use fptsim::RngStream;

fn main() -> fptsim::Result<()> {
    let (alpha, q) = (0.75, 10.0);
    let r = RPolicy::Auto.resolve(alpha, q, f64::INFINITY);
    let spec = SubordinatorSpec::new(alpha, 2.0, q, r, f64::INFINITY, FiniteMeasure::exp(1.0)?)?;
    let cfg = EngineConfig::default();
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &cfg, &fpts)?;
    let level = Boundary::constant(5.0)?;

    let mut rng = RngStream::new(1);
    println!("{:>10} {:>10} {:>10} {:>4} {:>4}", "tau", "U", "V", "M", "K");
    let n = 2000;
    let (mut tau_sum, mut jump_sum) = (0.0, 0.0);
    for i in 0..n {
        let x = engine.sample(&level, &mut rng)?;
        if i < 8 {
            println!("{:>10.5} {:>10.5} {:>10.5} {:>4} {:>4}", x.t, x.u, x.v, x.diag.loop_count, x.diag.cpp_jump_count);
        }
        tau_sum += x.t;
        jump_sum += x.v - x.u;
    }
    println!("mean tau = {:.4}, mean crossing jump = {:.4} over {n} draws", tau_sum / n as f64, jump_sum / n as f64);
    Ok(())
}
