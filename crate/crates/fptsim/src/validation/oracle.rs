//! Approximate brute-force first passage by ε-truncation.
//!
//! Jumps above ε are simulated one by one. In `Plain` mode the jumps below ε
//! are dropped. In `Compensated` mode they are replaced by their mean drift
//! μ_ε = ϑ∫₀^ε x^{−α}e^{−qx}dx and ε shrinks with the distance to the
//! boundary, ε = max(min(ε₀, κ·δ), ε_floor), so the approximation is finest
//! where the crossing is decided. Drift crossings are located by root finding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::measure::{sample_tempered_tail, tempered_tail_mass};
use crate::model::{Boundary, CrossingTriplet, SubordinatorSpec};
use crate::numerics::integrate_log;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    Plain,
    Compensated,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleConfig {
    pub eps: f64,
    pub mode: OracleMode,
    /// ε ≤ κ·(distance to the boundary) in compensated mode.
    pub kappa: f64,
    pub eps_floor: f64,
}

impl OracleConfig {
    pub fn plain(eps: f64) -> Self {
        Self { eps, mode: OracleMode::Plain, kappa: f64::INFINITY, eps_floor: eps }
    }

    pub fn compensated(eps: f64) -> Self {
        Self { eps, mode: OracleMode::Compensated, kappa: 1e-3, eps_floor: eps * 1e-6 }
    }
}

#[derive(Clone, Copy, Debug)]
struct Level {
    eps: f64,
    /// rate of jumps on (ε, r] from the stable part
    rate_small: f64,
    drift: f64,
}

/// ϑ∫₀^ε x^{k−α−1} e^{−qx} dx for k = 1 (mean) or 2 (second moment).
pub fn small_jump_moment(vartheta: f64, alpha: f64, q: f64, eps: f64, k: i32) -> Result<f64> {
    let f = |x: f64| (-q * x).exp() * x.powf(k as f64 - alpha - 1.0);
    Ok(vartheta * integrate_log(f, eps * 1e-40, eps, 1e-12)?)
}

/// ε·E[τ]-style bias proxy: E[τ]·ϑ∫₀^ε x^{−α}e^{−qx}dx, the expected total
/// size of the neglected jumps.
pub fn bias_proxy(spec: &SubordinatorSpec, eps: f64, mean_tau: f64) -> Result<f64> {
    Ok(mean_tau * small_jump_moment(spec.vartheta, spec.alpha, spec.q, eps, 1)?)
}

/// sqrt(E[τ]·ϑ∫₀^ε x^{1−α}e^{−qx}dx): the spread of the neglected jumps
/// around their mean, which is what remains after compensation.
pub fn residual_proxy(spec: &SubordinatorSpec, eps: f64, mean_tau: f64) -> Result<f64> {
    Ok((mean_tau * small_jump_moment(spec.vartheta, spec.alpha, spec.q, eps, 2)?).sqrt())
}

pub struct Oracle<'a> {
    spec: &'a SubordinatorSpec,
    cfg: OracleConfig,
    levels: Vec<Level>,
    rate_finite: f64,
}

impl<'a> Oracle<'a> {
    pub fn new(spec: &'a SubordinatorSpec, cfg: OracleConfig) -> Result<Self> {
        if !(cfg.eps > 0.0 && cfg.eps < spec.r) {
            return Err(Error::Param(format!("oracle needs 0 < ε < r, got ε = {}", cfg.eps)));
        }
        let mut levels = Vec::new();
        let mut eps = cfg.eps;
        loop {
            let drift = match cfg.mode {
                OracleMode::Plain => 0.0,
                OracleMode::Compensated => small_jump_moment(spec.vartheta, spec.alpha, spec.q, eps, 1)?,
            };
            let rate_small = tempered_tail_mass(spec.vartheta, spec.alpha, spec.q, eps, spec.r)?;
            levels.push(Level { eps, rate_small, drift });
            if cfg.mode == OracleMode::Plain || eps <= cfg.eps_floor {
                break;
            }
            eps = (eps * 0.5).max(cfg.eps_floor);
        }
        Ok(Self { spec, cfg, levels, rate_finite: spec.finite_part.mass() })
    }

    fn level_for(&self, gap: f64) -> (usize, &Level) {
        let want = self.cfg.kappa * gap;
        let i = self.levels.iter().position(|l| l.eps <= want).unwrap_or(self.levels.len() - 1);
        (i, &self.levels[i])
    }

    /// One approximate draw of (τ, Z_{τ−}, Z_τ).
    pub fn sample(&self, c: &Boundary, rng: &mut RngStream) -> Result<CrossingTriplet> {
        if !(c.c0() > 0.0) {
            return Err(Error::Precondition(format!("boundary must start above 0, got {}", c.c0())));
        }
        let (mut t, mut z) = (0.0f64, 0.0f64);
        loop {
            let gap = c.eval(t) - z;
            let (i, lv) = self.level_for(gap);
            let finest = i + 1 == self.levels.len();
            let rate = lv.rate_small + self.rate_finite;
            let wait = if rate > 0.0 { rng.exp1() / rate } else { f64::INFINITY };
            // while ε can still shrink, let the drift cover at most half the gap
            let horizon = if finest || lv.drift == 0.0 { wait } else { wait.min(0.5 * gap / lv.drift) };
            if let Some(s) = self.drift_meets(c, t, z, lv.drift, horizon)? {
                let tc = t + s;
                let level = c.eval(tc);
                let mut out = CrossingTriplet::new(tc, level, level);
                out.diag.crept = true;
                return Ok(out);
            }
            if horizon < wait {
                z += lv.drift * horizon;
                t += horizon;
                continue;
            }
            if !wait.is_finite() {
                return Err(Error::Numeric("oracle path never reaches the boundary".into()));
            }
            t += wait;
            z += lv.drift * wait;
            let j = if rng.uniform() * rate < lv.rate_small {
                sample_tempered_tail(self.spec.alpha, self.spec.q, lv.eps, self.spec.r, rng)
            } else {
                self.spec.finite_part.sample(rng)
            };
            let level = c.eval(t);
            if z + j > level {
                return Ok(CrossingTriplet::new(t, z, z + j));
            }
            z += j;
        }
    }

    /// First s in [0, horizon] with z + μs ≥ c(t + s), if any.
    fn drift_meets(&self, c: &Boundary, t: f64, z: f64, mu: f64, horizon: f64) -> Result<Option<f64>> {
        let h = |s: f64| c.eval(t + s) - z - mu * s;
        if h(0.0) <= 0.0 {
            return Ok(Some(0.0));
        }
        if let Some(level) = c.constant_level() {
            if mu <= 0.0 {
                return Ok(None);
            }
            let s = (level - z) / mu;
            return Ok(if s <= horizon { Some(s) } else { None });
        }
        let end = if horizon.is_finite() {
            horizon
        } else {
            // find a finite point past the crossing, if there is one
            let mut s = 1.0;
            let mut n = 0;
            while h(s) > 0.0 {
                s *= 2.0;
                n += 1;
                if n > 200 {
                    return Ok(None);
                }
            }
            s
        };
        if h(end) > 0.0 {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0.0, end);
        while hi - lo > 1e-14 * hi.max(1e-300) {
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
        Ok(Some(hi))
    }
}

/// One approximate draw; builds the oracle's tables each call.
pub fn oracle_triplet(spec: &SubordinatorSpec, c: &Boundary, cfg: OracleConfig, rng: &mut RngStream) -> Result<CrossingTriplet> {
    Oracle::new(spec, cfg)?.sample(c, rng)
}
