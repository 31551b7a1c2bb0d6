//! First passage of the stable subordinator (q = 0) over a non-increasing boundary.

use crate::error::{Error, Result};
use crate::model::{Boundary, CrossingTriplet, Tally};
use crate::rng::RngStream;
use crate::stable::{ln_stable_sample, ZolotarevContext};

use super::undershoot::{constant_level_triplet, overshoot_from_gap, undershoot_fraction};

const MAX_BRACKET_STEPS: usize = 1000;

/// Solves τ^{−1/α} g(τ) = ζ₁ for a draw ζ₁ of the time-one marginal, using
/// {τ > t} = {ζ_t < g(t)} and ζ_t = t^{1/α}ζ₁ in law. Returns (τ, g(τ)).
pub fn stable_crossing_time(ctx: &ZolotarevContext, theta: f64, g: &Boundary, rng: &mut RngStream) -> Result<(f64, f64)> {
    let g0 = g.c0();
    if !(g0 > 0.0) {
        return Err(Error::Precondition(format!("boundary must start above 0, got {g0}")));
    }
    let ln_z = ln_stable_sample(ctx, theta, 1.0, rng);
    let a = ctx.alpha;
    if let Some(level) = g.constant_level() {
        return Ok(((a * (level.ln() - ln_z)).exp(), level));
    }
    crossing_time_from(g, a, ln_z)
}

pub(crate) fn crossing_time_from(g: &Boundary, a: f64, ln_z: f64) -> Result<(f64, f64)> {
    let h = |lt: f64| g.eval(lt.exp()).ln() - lt / a - ln_z;
    // g ≤ g(0) puts the root at or below the constant-boundary answer
    let hi = a * (g.c0().ln() - ln_z);
    if h(hi) >= 0.0 {
        let t = hi.exp();
        return Ok((t, g.eval(t)));
    }
    let mut step = 1.0;
    let mut lo = hi - step;
    let mut n = 0;
    while !(h(lo) > 0.0) {
        n += 1;
        if n > MAX_BRACKET_STEPS {
            return Err(Error::Numeric("crossing-time bracket not found".into()));
        }
        step *= 2.0;
        lo = hi - step;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (0.5 * (lo + hi)).exp();
    let level = g.eval(t);
    if !(level > 0.0) {
        // rounding put t on the far side of a zero of g
        let t = lo.exp();
        return Ok((t, g.eval(t)));
    }
    Ok((t, level))
}

/// P(creep | τ = t) = |g′(t)| / (|g′(t)| + g(t)/(αt)).
pub fn creep_probability(alpha: f64, t: f64, level: f64, slope: f64) -> f64 {
    if slope <= 0.0 {
        return 0.0;
    }
    slope / (slope + level / (alpha * t))
}

/// Exact (τ, U, V) for the stable subordinator. A strictly decreasing
/// boundary can be met continuously, in which case U = V = g(τ).
pub fn stable_triplet(ctx: &ZolotarevContext, theta: f64, g: &Boundary, rng: &mut RngStream, tally: &mut Tally) -> Result<CrossingTriplet> {
    let g0 = g.c0();
    if !(g0 > 0.0) {
        return Err(Error::Precondition(format!("boundary must start above 0, got {g0}")));
    }
    if let Some(level) = g.constant_level() {
        let (t, u, v) = constant_level_triplet(ctx, theta, level, rng, tally)?;
        return Ok(CrossingTriplet::new(t, u, v));
    }
    let (tau, level) = stable_crossing_time(ctx, theta, g, rng)?;
    stable_triplet_at(ctx, theta, g, tau, level, rng, tally)
}

/// Completes a general-boundary triplet given its crossing time and level:
/// creep with the right probability, otherwise undershoot then overshoot.
pub(crate) fn stable_triplet_at(
    ctx: &ZolotarevContext,
    theta: f64,
    g: &Boundary,
    tau: f64,
    level: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<CrossingTriplet> {
    let slope = -g.derivative(tau);
    if slope > 0.0 && rng.uniform() < creep_probability(ctx.alpha, tau, level, slope) {
        tally.creep_events += 1;
        let mut out = CrossingTriplet::new(tau, level, level);
        out.diag.crept = true;
        return Ok(out);
    }
    let eta = (level.ln() - (theta * tau).ln() / ctx.alpha).exp();
    let (b, rest) = undershoot_fraction(ctx, eta, rng, tally)?;
    let u = level * b;
    let v = overshoot_from_gap(ctx.alpha, u, level * rest, level, rng);
    Ok(CrossingTriplet::new(tau, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_closed_form_matches_bisection() {
        let c = ZolotarevContext::new(0.6).unwrap();
        let g = Boundary::constant(2.5).unwrap();
        let twin = Boundary::custom(std::sync::Arc::new(|_| 2.5)).unwrap();
        for seed in 0..50 {
            let (t1, _) = stable_crossing_time(&c, 1.3, &g, &mut RngStream::new(seed)).unwrap();
            let (t2, _) = stable_crossing_time(&c, 1.3, &twin, &mut RngStream::new(seed)).unwrap();
            assert!((t1 / t2 - 1.0).abs() < 1e-10, "{t1} vs {t2}");
        }
    }

    #[test]
    fn doubling_level_scales_time() {
        let c = ZolotarevContext::new(0.4).unwrap();
        let g1 = Boundary::constant(1.0).unwrap();
        let g2 = Boundary::constant(2.0).unwrap();
        let (t1, _) = stable_crossing_time(&c, 1.0, &g1, &mut RngStream::new(8)).unwrap();
        let (t2, _) = stable_crossing_time(&c, 1.0, &g2, &mut RngStream::new(8)).unwrap();
        assert!((t2 / t1 - 2f64.powf(0.4)).abs() < 1e-12);
    }

    #[test]
    fn linear_boundary_structure() {
        let c = ZolotarevContext::new(0.7).unwrap();
        let g = Boundary::linear(1.0, 0.8).unwrap();
        let mut rng = RngStream::new(12);
        let mut tally = Tally::default();
        for _ in 0..300 {
            let x = stable_triplet(&c, 1.0, &g, &mut rng, &mut tally).unwrap();
            let lv = g.eval(x.t);
            if x.diag.crept {
                assert_eq!(x.u, x.v);
            } else {
                assert!(x.u <= lv && lv < x.v, "{x:?} at {lv}");
            }
        }
        assert!(tally.creep_events > 0);
    }
}
