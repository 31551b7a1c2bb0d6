//! Tempered-stable first passage by windowed exponential tilting.

use crate::error::{Error, Result};
use crate::model::{Boundary, CrossingTriplet, Tally};
use crate::rng::RngStream;
use crate::stable::{small_stable_sample, ZolotarevContext};

use super::crossing::{stable_crossing_time, stable_triplet, stable_triplet_at};
use super::FptsSampler;

/// Exact triplet for the tempered stable subordinator with
/// E e^{−uS_t} = e^{θt(q^α − (u+q)^α)}.
///
/// Windows have length t* = 1/(θq^α), so the tilt e^{θq^α s − qS_s} stopped
/// at s ≤ t* never exceeds e and each window is accepted with probability w/e.
pub fn fpts_default(
    ctx: &ZolotarevContext,
    theta: f64,
    q: f64,
    f: &Boundary,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<CrossingTriplet> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::Param(format!("need finite q ≥ 0, got {q}")));
    }
    if q == 0.0 {
        return stable_triplet(ctx, theta, f, rng, tally);
    }
    let rate = theta * q.powf(ctx.alpha);
    let t_star = 1.0 / rate;
    let (mut t_acc, mut v_acc) = (0.0, 0.0);
    let mut g = f.clone();
    loop {
        tally.window_proposals += 1;
        // on a moving boundary the jump at τ is only needed when τ ≤ t*
        let crossed = if g.constant_level().is_some() {
            Some(stable_triplet(ctx, theta, &g, rng, tally)?).filter(|x| x.t <= t_star)
        } else {
            let (tau, level) = stable_crossing_time(ctx, theta, &g, rng)?;
            if tau <= t_star {
                Some(stable_triplet_at(ctx, theta, &g, tau, level, rng, tally)?)
            } else {
                None
            }
        };
        let (ln_w, step) = match &crossed {
            Some(x) => (rate * x.t - q * x.v, 0.0),
            None => {
                // no crossing by t* is exactly {ζ_{t*} < g(t*)}
                let w = small_stable_sample(ctx, theta, t_star, g.eval(t_star), rng, tally)?;
                (1.0 - q * w, w)
            }
        };
        assert!(ln_w <= 1.0 + 1e-12, "window weight e^{ln_w} exceeds e");
        if rng.exp1() < 1.0 - ln_w {
            tally.window_rejections += 1;
            continue;
        }
        match crossed {
            Some(x) => {
                let mut out = CrossingTriplet::new(t_acc + x.t, v_acc + x.u, v_acc + x.v);
                out.diag.crept = x.diag.crept;
                return Ok(out);
            }
            None => {
                t_acc += t_star;
                v_acc += step;
                g = g.shifted(t_star, step);
            }
        }
    }
}

/// The default [`FptsSampler`]: [`fpts_default`] with fixed (α, θ, q).
#[derive(Clone, Debug)]
pub struct TemperedStableFpts {
    pub ctx: ZolotarevContext,
    pub theta: f64,
    pub q: f64,
}

impl TemperedStableFpts {
    pub fn new(alpha: f64, theta: f64, q: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Param(format!("theta must be positive, got {theta}")));
        }
        Ok(Self { ctx: ZolotarevContext::new(alpha)?, theta, q })
    }
}

impl FptsSampler for TemperedStableFpts {
    fn sample(&self, f: &Boundary, rng: &mut RngStream, tally: &mut Tally) -> Result<CrossingTriplet> {
        fpts_default(&self.ctx, self.theta, self.q, f, rng, tally)
    }
}
