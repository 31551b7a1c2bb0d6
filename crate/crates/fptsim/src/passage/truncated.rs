//! First passage of the r-truncated tempered stable process.

use crate::error::{Error, Result};
use crate::model::{Boundary, CrossingTriplet, Tally};
use crate::rng::RngStream;

use super::FptsSampler;

/// Repeats `fpts` until the crossing jump V − U is at most `r`. Below a
/// boundary b ≤ r the truncated and untruncated paths agree up to the first
/// jump larger than r, which can only be the crossing jump.
pub fn truncated_triplet(
    r: f64,
    b: &Boundary,
    fpts: &dyn FptsSampler,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<CrossingTriplet> {
    if !(r > 0.0) {
        return Err(Error::Param(format!("r must be positive, got {r}")));
    }
    let b0 = b.c0();
    if !(b0 > 0.0) {
        return Err(Error::Precondition(format!("boundary must start above 0, got {b0}")));
    }
    if r.is_finite() {
        let horizon = 1.0f64.max(b0);
        let sup = b.sup_on_grid(horizon, 64);
        if sup > r * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!("boundary reaches {sup} above r = {r}")));
        }
    }
    loop {
        tally.truncation_proposals += 1;
        let x = fpts.sample(b, rng, tally)?;
        if x.v - x.u <= r {
            return Ok(x);
        }
        tally.truncation_rejections += 1;
    }
}
