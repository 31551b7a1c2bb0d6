//! The main loop: truncated tempered-stable crossings interleaved with
//! compound-Poisson jumps, for Z = Y + Q.

use crate::error::{Error, Result};
use crate::model::{Boundary, CrossingTriplet, EngineConfig, FiniteMeasure, SubordinatorSpec, Tally};
use crate::passage::{truncated_triplet, FptsSampler, TemperedStableFpts};
use crate::rng::RngStream;
use crate::stable::{small_tempered_stable_sample, ZolotarevContext};

/// A jump of the finite part, drawn only when needed.
pub struct CppJump<'a> {
    fm: &'a FiniteMeasure,
}

impl CppJump<'_> {
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        self.fm.sample(rng)
    }
}

/// D ∼ Exp(Λ), or +∞ when the measure is zero, with its jump sampler.
pub fn cpp_first_jump<'a>(fm: &'a FiniteMeasure, rng: &mut RngStream) -> (f64, CppJump<'a>) {
    let mass = fm.mass();
    let d = if mass > 0.0 { rng.exp1() / mass } else { f64::INFINITY };
    (d, CppJump { fm })
}

/// Accumulated time and value after each iteration of the main loop,
/// starting with (0, 0) and ending at (τ, Z_τ).
pub type Trace = Vec<(f64, f64)>;

/// A reusable sampler for one (spec, config, fpts) combination.
pub struct Engine<'a> {
    spec: &'a SubordinatorSpec,
    cfg: &'a EngineConfig,
    fpts: &'a dyn FptsSampler,
    ctx: ZolotarevContext,
}

impl<'a> Engine<'a> {
    pub fn new(spec: &'a SubordinatorSpec, cfg: &'a EngineConfig, fpts: &'a dyn FptsSampler) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { spec, cfg, fpts, ctx: ZolotarevContext::new(spec.alpha)? })
    }

    pub fn sample(&self, c: &Boundary, rng: &mut RngStream) -> Result<CrossingTriplet> {
        self.run(c, rng, None)
    }

    pub fn sample_traced(&self, c: &Boundary, rng: &mut RngStream) -> Result<(CrossingTriplet, Trace)> {
        let mut trace = vec![(0.0, 0.0)];
        let x = self.run(c, rng, Some(&mut trace))?;
        Ok((x, trace))
    }

    fn run(&self, c: &Boundary, rng: &mut RngStream, mut trace: Option<&mut Trace>) -> Result<CrossingTriplet> {
        let c0 = c.c0();
        if !(c0 > 0.0) {
            return Err(Error::Precondition(format!("boundary must start above 0, got {c0}")));
        }
        let spec = self.spec;
        let cap = spec.r * self.cfg.rho;
        let fm = &spec.finite_part;
        let mut tally = Tally::default();
        let (mut t, mut u, mut v) = (0.0, 0.0, 0.0);
        let (mut loops, mut jumps) = (0u64, 0u64);
        let mut crept = false;
        let (mut d, jump) = cpp_first_jump(fm, rng);
        let mut b = c.update(0.0, 0.0, cap);
        while b.c0() > 0.0 {
            loops += 1;
            tally.fpts_calls += 1;
            let x = truncated_triplet(spec.r, &b, self.fpts, rng, &mut tally)?;
            if x.t < d {
                t += x.t;
                u = v + x.u;
                v += x.v;
                d -= x.t;
                crept = x.diag.crept;
            } else {
                let w = small_tempered_stable_sample(&self.ctx, spec.theta, spec.q, d, b.eval(d), rng, &mut tally)?;
                let j = jump.draw(rng);
                jumps += 1;
                t += d;
                u = v + w;
                v += w + j;
                d = cpp_first_jump(fm, rng).0;
                crept = false;
            }
            if let Some(tr) = trace.as_deref_mut() {
                tr.push((t, v));
            }
            b = c.update(t, v, cap);
        }
        let level = c.eval(t);
        if crept {
            // the accumulated sum may differ from c(T) by rounding
            u = level;
            v = level;
        } else if v <= level {
            // the residual gap was below the resolution of the sum
            v = level.next_up();
        }
        let mut out = CrossingTriplet::new(t, u, v);
        out.diag.loop_count = loops;
        out.diag.cpp_jump_count = jumps;
        out.diag.crept = crept;
        out.diag.tally = tally;
        Ok(out)
    }
}

/// One exact draw of (τ_c, Z_{τ−}, Z_τ).
pub fn sample_crossing(
    spec: &SubordinatorSpec,
    c: &Boundary,
    cfg: &EngineConfig,
    fpts: &dyn FptsSampler,
    rng: &mut RngStream,
) -> Result<CrossingTriplet> {
    Engine::new(spec, cfg, fpts)?.sample(c, rng)
}

/// The default tempered-stable sampler matching `spec`.
pub fn default_fpts(spec: &SubordinatorSpec) -> Result<TemperedStableFpts> {
    TemperedStableFpts::new(spec.alpha, spec.theta, spec.q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_measure_never_jumps() {
        let fm = FiniteMeasure::none();
        let mut rng = RngStream::new(1);
        assert_eq!(cpp_first_jump(&fm, &mut rng).0, f64::INFINITY);
    }

    #[test]
    fn first_jump_means() {
        let fm = FiniteMeasure::exp_with_mass(1.0, 2.0).unwrap();
        let mut rng = RngStream::new(2);
        let n = 100_000;
        let (mut sd, mut sj) = (0.0, 0.0);
        for _ in 0..n {
            let (d, j) = cpp_first_jump(&fm, &mut rng);
            sd += d;
            sj += j.draw(&mut rng);
        }
        let se = 1.0 / (n as f64).sqrt();
        assert!((sd / n as f64 - 0.5).abs() < 3.0 * 0.5 * se);
        assert!((sj / n as f64 - 1.0).abs() < 3.0 * se);
    }

    #[test]
    fn nonpositive_start_is_rejected() {
        let spec = SubordinatorSpec::new(0.5, 1.0, 0.0, f64::INFINITY, f64::INFINITY, FiniteMeasure::none()).unwrap();
        let cfg = EngineConfig::default();
        let fpts = default_fpts(&spec).unwrap();
        let c = Boundary::constant(1.0).unwrap().update(0.0, 2.0, f64::INFINITY);
        let r = sample_crossing(&spec, &c, &cfg, &fpts, &mut RngStream::new(0));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
