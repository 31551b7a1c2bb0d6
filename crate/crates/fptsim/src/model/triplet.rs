//! First-passage output and the counters collected while producing it.

use serde::Serialize;

/// Counters shared by every sampler in the crate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Tally {
    pub logconcave_proposals: u64,
    pub logconcave_accepts: u64,
    pub tempered_small_proposals: u64,
    pub truncation_proposals: u64,
    pub truncation_rejections: u64,
    pub fpts_calls: u64,
    pub window_proposals: u64,
    pub window_rejections: u64,
    pub undershoot_proposals: u64,
    pub creep_events: u64,
}

impl Tally {
    pub fn merge(&mut self, o: &Tally) {
        self.logconcave_proposals += o.logconcave_proposals;
        self.logconcave_accepts += o.logconcave_accepts;
        self.tempered_small_proposals += o.tempered_small_proposals;
        self.truncation_proposals += o.truncation_proposals;
        self.truncation_rejections += o.truncation_rejections;
        self.fpts_calls += o.fpts_calls;
        self.window_proposals += o.window_proposals;
        self.window_rejections += o.window_rejections;
        self.undershoot_proposals += o.undershoot_proposals;
        self.creep_events += o.creep_events;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// M: iterations of the main loop.
    pub loop_count: u64,
    /// K: compound-Poisson jumps used.
    pub cpp_jump_count: u64,
    /// The boundary was reached continuously (possible only when it is
    /// strictly decreasing at the crossing time); then U = V = c(T).
    pub crept: bool,
    pub tally: Tally,
}

/// (T, U, V): crossing time, level just before, level at the crossing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingTriplet {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub diag: Diagnostics,
}

impl CrossingTriplet {
    pub fn new(t: f64, u: f64, v: f64) -> Self {
        Self { t, u, v, diag: Diagnostics::default() }
    }
}

/// Maps a triplet for c̃(t) = c(t) − μt back to the process with drift μ.
pub fn drift_adjust(triplet: &CrossingTriplet, mu: f64) -> CrossingTriplet {
    let shift = mu * triplet.t;
    CrossingTriplet {
        t: triplet.t,
        u: triplet.u + shift,
        v: triplet.v + shift,
        diag: triplet.diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_shift() {
        let x = CrossingTriplet::new(1.0, 2.0, 3.0);
        assert_eq!(drift_adjust(&x, 0.0), x);
        let y = drift_adjust(&x, 0.5);
        assert_eq!((y.t, y.u, y.v), (1.0, 2.5, 3.5));
        assert_eq!(y.v - y.u, x.v - x.u);
    }
}
