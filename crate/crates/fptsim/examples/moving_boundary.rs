//! Crossing a decreasing boundary. The stable part may creep across a
//! boundary that moves down to meet it, in which case U = V = c(τ).
//! With a linear drift μ the same draws give the crossing of c(t) + μt.

use std::sync::Arc;

use fptsim::engine::{default_fpts, Engine};
use fptsim::model::{drift_adjust, Boundary, EngineConfig, FiniteMeasure, SubordinatorSpec};
use fptsim::RngStream;

fn main() -> fptsim::Result<()> {
    let spec = SubordinatorSpec::new(0.6, 1.0, 1.0, 1.0, f64::INFINITY, FiniteMeasure::pareto(2.0, 1.0)?)?;
    let cfg = EngineConfig::default();
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &cfg, &fpts)?;
    let mut rng = RngStream::new(7);

    let boundaries = [
        ("linear 2 - 0.8t", Boundary::linear(2.0, 0.8)?),
        ("1 + e^-t", Boundary::custom(Arc::new(|t: f64| 1.0 + (-t).exp()))?),
    ];
    for (name, c) in &boundaries {
        let draws: Vec<_> = (0..2000).map(|_| engine.sample(c, &mut rng)).collect::<Result<_, _>>()?;
        let crept = draws.iter().filter(|x| x.diag.crept).count();
        let mean_t = draws.iter().map(|x| x.t).sum::<f64>() / draws.len() as f64;
        println!("{name:>16}: mean tau {mean_t:.4}, crept {crept} of {}", draws.len());
    }

    // Z + μt crosses 2 exactly when Z crosses 2 − μt
    let mu = 0.8;
    let x = drift_adjust(&engine.sample(&boundaries[0].1, &mut rng)?, mu);
    println!("with drift {mu}: tau {:.4}, U {:.4} ≤ 2 ≤ V {:.4}", x.t, x.u, x.v);
    Ok(())
}
