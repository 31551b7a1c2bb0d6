//! Stable and tempered-stable marginals, plain and conditioned on {S_t < s}.

use crate::error::{Error, Result};
use crate::model::Tally;
use crate::numerics::log_add_exp;
use crate::rng::RngStream;

use super::logconcave::{logconcave_unit_sample, SigmaPotential};
use super::ZolotarevContext;

fn check(theta: f64, t: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite() && t > 0.0 && t.is_finite()) {
        return Err(Error::Param(format!("need finite theta, t > 0, got ({theta}, {t})")));
    }
    Ok(())
}

/// ln S_t where E e^{−uS_t} = e^{−θtu^α}.
pub fn ln_stable_sample(ctx: &ZolotarevContext, theta: f64, t: f64, rng: &mut RngStream) -> f64 {
    let u = rng.uniform();
    let ln_sigma = ctx.ln_sigma_at_zero + ctx.ln_sigma_excess(u);
    (theta * t).ln() / ctx.alpha + (ln_sigma - rng.exp1().ln()) / ctx.beta
}

/// S_t = (θt)^{1/α}(σ_α(U)/E)^{1/β}.
pub fn stable_sample(ctx: &ZolotarevContext, theta: f64, t: f64, rng: &mut RngStream) -> f64 {
    ln_stable_sample(ctx, theta, t, rng).exp()
}

/// ln of a draw from S_t | {S_t < s}, q = 0.
pub(crate) fn ln_small_stable_sample(
    ctx: &ZolotarevContext,
    theta: f64,
    t: f64,
    s: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<f64> {
    check(theta, t)?;
    if !(s > 0.0) {
        return Err(Error::Param(format!("need s > 0, got {s}")));
    }
    if s.is_infinite() {
        return Ok(ln_stable_sample(ctx, theta, t, rng));
    }
    let b = ctx.beta;
    let ln_tt = (theta * t).ln();
    let ln_s = s.ln();
    let psi = SigmaPotential { ctx, ln_lambda: (b + 1.0) * ln_tt - b * ln_s };
    let u = logconcave_unit_sample(&psi, rng, tally)?;
    let ln_sigma = ctx.ln_sigma_at_zero + ctx.ln_sigma_excess(u);
    let e = rng.exp1();
    // (s^{−β} + (θt)^{−β−1}E′/σ_α(U))^{−1/β}
    let ln_inv = log_add_exp(-b * ln_s, -(b + 1.0) * ln_tt + e.ln() - ln_sigma);
    Ok(-ln_inv / b)
}

/// Exact draw from S_t | {S_t < s} for the stable law (q = 0).
pub fn small_stable_sample(
    ctx: &ZolotarevContext,
    theta: f64,
    t: f64,
    s: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<f64> {
    let v = ln_small_stable_sample(ctx, theta, t, s, rng, tally)?.exp();
    Ok(v.min(s * (1.0 - f64::EPSILON)))
}

/// Exact draw from the tempered S_t | {S_t < s}: stable proposals accepted on {E > qW}.
pub fn small_tempered_stable_sample(
    ctx: &ZolotarevContext,
    theta: f64,
    q: f64,
    t: f64,
    s: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<f64> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::Param(format!("need finite q ≥ 0, got {q}")));
    }
    if q == 0.0 {
        return small_stable_sample(ctx, theta, t, s, rng, tally);
    }
    loop {
        tally.tempered_small_proposals += 1;
        let w = small_stable_sample(ctx, theta, t, s, rng, tally)?;
        if rng.exp1() > q * w {
            return Ok(w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_is_deterministic() {
        let c = ZolotarevContext::new(0.6).unwrap();
        let a = stable_sample(&c, 1.0, 1.0, &mut RngStream::new(9));
        let b = stable_sample(&c, 2.0, 3.0, &mut RngStream::new(9));
        assert!((b / a - 6f64.powf(1.0 / 0.6)).abs() < 1e-12 * b / a);
    }

    #[test]
    fn conditioned_draws_stay_below_level() {
        let c = ZolotarevContext::new(0.3).unwrap();
        let mut rng = RngStream::new(1);
        let mut t = Tally::default();
        for &s in &[1e-12, 0.05, 1.0, 1e6] {
            for _ in 0..2000 {
                let w = small_stable_sample(&c, 1.0, 1.0, s, &mut rng, &mut t).unwrap();
                assert!(w > 0.0 && w < s, "{w} vs {s}");
            }
        }
    }

    #[test]
    fn extreme_lambda_is_finite() {
        let c = ZolotarevContext::new(0.9).unwrap();
        let mut rng = RngStream::new(2);
        let mut t = Tally::default();
        for _ in 0..200 {
            let w = small_stable_sample(&c, 5.0, 100.0, 1e-8, &mut rng, &mut t).unwrap();
            assert!(w.is_finite() && w > 0.0 && w < 1e-8);
            let w = small_stable_sample(&c, 1e-3, 1e-6, 1e6, &mut rng, &mut t).unwrap();
            assert!(w.is_finite() && w > 0.0 && w < 1e6);
        }
    }
}
