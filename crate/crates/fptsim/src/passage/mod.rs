//! First-passage triplets for stable and tempered stable subordinators.

mod crossing;
mod tempered;
mod truncated;
mod undershoot;

use crate::error::Result;
use crate::model::{Boundary, CrossingTriplet, Tally};
use crate::rng::RngStream;

pub use crossing::{creep_probability, stable_crossing_time, stable_triplet};
pub use tempered::{fpts_default, TemperedStableFpts};
pub use truncated::truncated_triplet;
pub use undershoot::{ln_h, m_alpha, stable_overshoot, stable_undershoot, stable_undershoot_beta};

/// A sampler of (τ, S_{τ−}, S_τ) for a tempered stable subordinator S over a
/// non-increasing boundary with f(0) > 0.
///
/// Outputs satisfy U ≤ f(T) ≤ V, with U < V unless the boundary was met by
/// creeping.
pub trait FptsSampler: Send + Sync {
    fn sample(&self, f: &Boundary, rng: &mut RngStream, tally: &mut Tally) -> Result<CrossingTriplet>;
}
