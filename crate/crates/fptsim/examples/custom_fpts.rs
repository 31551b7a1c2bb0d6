//! The engine accepts any `FptsSampler` for the tempered stable part. This
//! one wraps the default sampler and counts how often the engine calls it.

use std::sync::atomic::{AtomicU64, Ordering};

use fptsim::engine::Engine;
use fptsim::model::{Boundary, CrossingTriplet, EngineConfig, FiniteMeasure, SubordinatorSpec, Tally};
use fptsim::passage::{FptsSampler, TemperedStableFpts};
use fptsim::RngStream;

struct Counting {
    inner: TemperedStableFpts,
    calls: AtomicU64,
}

impl FptsSampler for Counting {
    fn sample(&self, f: &Boundary, rng: &mut RngStream, tally: &mut Tally) -> fptsim::Result<CrossingTriplet> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.sample(f, rng, tally)
    }
}

fn main() -> fptsim::Result<()> {
    let spec = SubordinatorSpec::new(0.5, 1.0, 2.0, 0.5, 2.0, FiniteMeasure::exp(2.0)?)?;
    let fpts = Counting { inner: TemperedStableFpts::new(spec.alpha, spec.theta, spec.q)?, calls: AtomicU64::new(0) };
    let cfg = EngineConfig::default();
    let engine = Engine::new(&spec, &cfg, &fpts)?;
    let c = Boundary::constant(3.0)?;
    let mut rng = RngStream::new(11);
    let n = 1000;
    let mut loops = 0;
    for _ in 0..n {
        loops += engine.sample(&c, &mut rng)?.diag.loop_count;
    }
    println!("{n} crossings, {loops} loop iterations, {} sampler calls", fpts.calls.load(Ordering::Relaxed));
    Ok(())
}
