//! Rejection sampling from densities ∝ e^{−ψ(u)} on (0,1) with ψ convex.

use crate::error::{Error, Result};
use crate::model::Tally;
use crate::rng::RngStream;

use super::ZolotarevContext;

const MAX_PROPOSALS: u64 = 10_000_000;

/// A convex ψ ≥ 0 on (0,1) vanishing at `minimizer()`, given through ln ψ.
pub trait ConvexPotential {
    fn minimizer(&self) -> f64;
    /// ln ψ(u); −∞ where ψ = 0, +∞ allowed at the ends.
    fn ln_value(&self, u: f64) -> f64;
}

/// ψ(u) = λ(σ_α(u) − σ_α(u*)) with u* = 0.
pub struct SigmaPotential<'a> {
    pub ctx: &'a ZolotarevContext,
    pub ln_lambda: f64,
}

impl ConvexPotential for SigmaPotential<'_> {
    fn minimizer(&self) -> f64 {
        self.ctx.minimizer
    }

    fn ln_value(&self, u: f64) -> f64 {
        if u <= self.ctx.minimizer {
            return f64::NEG_INFINITY;
        }
        let d = self.ctx.ln_sigma_excess_pair(u, 1.0 - u);
        self.ln_lambda + self.ctx.ln_sigma_at_zero + d.exp_m1().ln()
    }
}

/// ψ ≡ 0 with u* anywhere; a flat density.
pub struct FlatPotential;

impl ConvexPotential for FlatPotential {
    fn minimizer(&self) -> f64 {
        0.5
    }
    fn ln_value(&self, _u: f64) -> f64 {
        f64::NEG_INFINITY
    }
}

/// One side of the envelope: flat from u* to `edge`, then e^{−p·|u−u*|/len}.
struct Side {
    edge: f64,
    end: f64,
    p: f64,
    len: f64,
    tail_mass: f64,
}

impl Side {
    fn build<P: ConvexPotential + ?Sized>(psi: &P, u_star: f64, end: f64) -> Side {
        let dir = if end > u_star { 1.0 } else { -1.0 };
        let dist = (end - u_star).abs();
        let flat = Side { edge: end, end, p: 0.0, len: dist, tail_mass: 0.0 };
        if dist <= 0.0 {
            return flat;
        }
        let at = |l: f64| psi.ln_value(u_star + dir * l.exp());
        let (mut lo, mut hi) = ((dist * 1e-300).max(f64::MIN_POSITIVE).ln(), dist.ln());
        // the endpoint itself is excluded, step just inside it
        let inside = if dir > 0.0 { end - end * f64::EPSILON } else { end + f64::MIN_POSITIVE };
        let hi_val = psi.ln_value(inside);
        if !(hi_val >= 0.0) {
            return flat;
        }
        if at(lo) >= 0.0 {
            hi = lo;
        } else {
            while hi - lo > 1e-3 {
                let mid = 0.5 * (lo + hi);
                if at(mid) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        let len = hi.exp();
        let edge = u_star + dir * len;
        if (edge - end) * dir >= 0.0 {
            return flat;
        }
        let p = psi.ln_value(edge).exp();
        if !(p.is_finite() && p > 0.0) {
            return flat;
        }
        let k = p * (end - edge).abs() / len;
        let tail_mass = (len / p) * (-p).exp() * -(-k).exp_m1();
        Side { edge, end, p, len, tail_mass }
    }

    fn sample_tail(&self, u_star: f64, rng: &mut RngStream) -> (f64, f64) {
        let k = self.p * (self.end - self.edge).abs() / self.len;
        let x = -(self.len / self.p) * (rng.uniform() * (-k).exp_m1()).ln_1p();
        let dir = if self.end > self.edge { 1.0 } else { -1.0 };
        let u = self.edge + dir * x;
        (u, self.p * (u - u_star).abs() / self.len)
    }
}

/// Exact draw from the density ∝ e^{−ψ} on (0,1).
///
/// The envelope is 1 between the points u₋ ≤ u* ≤ u₊ where ψ reaches 1
/// and e^{−ψ(u₊)|u−u*|/|u₊−u*|} beyond them, which dominates by convexity.
pub fn logconcave_unit_sample<P: ConvexPotential + ?Sized>(psi: &P, rng: &mut RngStream, tally: &mut Tally) -> Result<f64> {
    let u_star = psi.minimizer().clamp(0.0, 1.0);
    let right = Side::build(psi, u_star, 1.0);
    let left = Side::build(psi, u_star, 0.0);
    let centre = right.edge - left.edge;
    let total = centre + right.tail_mass + left.tail_mass;
    for _ in 0..MAX_PROPOSALS {
        tally.logconcave_proposals += 1;
        let pick = rng.uniform() * total;
        let (u, env) = if pick < centre {
            (left.edge + rng.uniform() * centre, 0.0)
        } else if pick < centre + right.tail_mass {
            right.sample_tail(u_star, rng)
        } else {
            left.sample_tail(u_star, rng)
        };
        if !(u > 0.0 && u < 1.0) {
            continue;
        }
        let val = psi.ln_value(u).exp();
        if val < env * (1.0 - 1e-9) - 1e-12 {
            return Err(Error::Envelope(u));
        }
        if val - env <= rng.exp1() {
            tally.logconcave_accepts += 1;
            return Ok(u);
        }
    }
    Err(Error::Numeric("log-concave sampler exceeded its proposal budget".into()))
}
