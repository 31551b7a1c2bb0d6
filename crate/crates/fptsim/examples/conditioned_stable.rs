//! Stable and tempered stable variables conditioned to stay below a level,
//! drawn without naive rejection even when the event is very unlikely.

use fptsim::model::Tally;
use fptsim::numerics::integrate;
use fptsim::stable::{phi_density, small_stable_sample, small_tempered_stable_sample, ZolotarevContext};
use fptsim::RngStream;

fn main() -> fptsim::Result<()> {
    let ctx = ZolotarevContext::new(0.3)?;
    let mut rng = RngStream::new(5);
    let (theta, t, s): (f64, f64, f64) = (1.0, 5.0, 0.05);
    let p = integrate(|y| phi_density(&ctx, y).unwrap_or(0.0), 0.0, s * (theta * t).powf(-1.0 / 0.3), 1e-8)?;
    println!("P(ζ_{t} < {s}) = {p:.3e}");

    let mut tally = Tally::default();
    let draws: Vec<f64> = (0..10_000).map(|_| small_stable_sample(&ctx, theta, t, s, &mut rng, &mut tally)).collect::<Result<_, _>>()?;
    let max = draws.iter().cloned().fold(0.0, f64::max);
    println!(
        "10000 conditioned draws, max {max:.4}, {:.2} proposals per draw",
        tally.logconcave_proposals as f64 / draws.len() as f64
    );

    let mut tally = Tally::default();
    let q = 4.0;
    let tempered: Vec<f64> =
        (0..10_000).map(|_| small_tempered_stable_sample(&ctx, theta, q, t, s, &mut rng, &mut tally)).collect::<Result<_, _>>()?;
    let mean = tempered.iter().sum::<f64>() / tempered.len() as f64;
    println!("tempered (q = {q}) conditioned mean {mean:.5}");
    Ok(())
}
