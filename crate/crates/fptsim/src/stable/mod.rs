//! Zolotarev machinery for the positive α-stable law.
//!
//! With β = α/(1−α),
//! σ_α(u) = [sin(απu)^α sin((1−α)πu)^{1−α} / sin(πu)]^{β+1},
//! the standard stable variable (E e^{−uS} = e^{−u^α}) is (σ_α(U)/E)^{1/β}
//! for U uniform and E exponential, and its density is
//! φ_α(x) = β ∫₀¹ σ_α(u) x^{−β−1} e^{−σ_α(u) x^{−β}} du.

mod density;
mod logconcave;
mod small;

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub use density::phi_density;
pub(crate) use density::{ln_phi, PhiGrid};
pub use logconcave::{logconcave_unit_sample, ConvexPotential, FlatPotential, SigmaPotential};
pub use small::{ln_stable_sample, small_stable_sample, small_tempered_stable_sample, stable_sample};

/// ln(sin x / x) for 0 ≤ x ≤ π, accurate for small x.
#[inline]
fn ls_small(x: f64) -> f64 {
    let x2 = x * x;
    -x2 * (1.0 / 6.0 + x2 * (1.0 / 180.0 + x2 * (1.0 / 2835.0 + x2 * (1.0 / 37800.0 + x2 / 467_775.0))))
}

/// ln(sin(kπu)/(kπu)) given u and w1 = 1 − u (both exact).
#[inline]
fn ls_k(k: f64, u: f64, w1: f64) -> f64 {
    let x = k * PI * u;
    if x < 0.1 {
        return ls_small(x);
    }
    let s = if x > 0.5 * PI {
        // π − kπu = π(1 − k + k w1)
        (PI * ((1.0 - k) + k * w1)).sin()
    } else {
        x.sin()
    };
    s.ln() - x.ln()
}

#[derive(Debug)]
pub struct ZolotarevContext {
    pub alpha: f64,
    pub beta: f64,
    /// σ_α(0+) = (1−α) α^{α/(1−α)}.
    pub sigma_at_zero: f64,
    pub ln_sigma_at_zero: f64,
    /// argmin of σ_α on (0,1); the search lands on the left end.
    pub minimizer: f64,
    mode: OnceLock<f64>,
    grid: OnceLock<Option<PhiGrid>>,
}

impl Clone for ZolotarevContext {
    fn clone(&self) -> Self {
        let mode = OnceLock::new();
        if let Some(m) = self.mode.get() {
            let _ = mode.set(*m);
        }
        Self {
            alpha: self.alpha,
            beta: self.beta,
            sigma_at_zero: self.sigma_at_zero,
            ln_sigma_at_zero: self.ln_sigma_at_zero,
            minimizer: self.minimizer,
            mode,
            grid: self.grid.clone(),
        }
    }
}

impl ZolotarevContext {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Param(format!("alpha must lie in (0,1), got {alpha}")));
        }
        let beta = alpha / (1.0 - alpha);
        let ln_s0 = (1.0 - alpha).ln() + beta * alpha.ln();
        let mut ctx = Self {
            alpha,
            beta,
            sigma_at_zero: ln_s0.exp(),
            ln_sigma_at_zero: ln_s0,
            minimizer: 0.0,
            mode: OnceLock::new(),
            grid: OnceLock::new(),
        };
        ctx.minimizer = ctx.ternary_minimizer();
        Ok(ctx)
    }

    /// Ternary search on ln σ − ln σ(0+) down to a bracket of 1e−12.
    fn ternary_minimizer(&self) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > 1e-12 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if self.ln_sigma_excess(m1) <= self.ln_sigma_excess(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let u = 0.5 * (lo + hi);
        if u < 1e-9 {
            0.0
        } else {
            u
        }
    }

    /// d(u) = ln σ_α(u) − ln σ_α(0+), with 1 − u passed separately so that
    /// values near u = 1 keep full precision. Unchecked: 0 < u < 1.
    #[inline]
    pub fn ln_sigma_excess_pair(&self, u: f64, w1: f64) -> f64 {
        let a = self.alpha;
        (self.beta + 1.0) * (a * ls_k(a, u, w1) + (1.0 - a) * ls_k(1.0 - a, u, w1) - ls_k(1.0, u, w1))
    }

    #[inline]
    pub fn ln_sigma_excess(&self, u: f64) -> f64 {
        self.ln_sigma_excess_pair(u, 1.0 - u)
    }

    /// ln σ_α(u); u = 0 and u = 1 are rejected (limits are explicit fields).
    pub fn log_sigma_alpha(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("sigma_alpha needs 0 < u < 1, got {u}")));
        }
        Ok(self.ln_sigma_at_zero + self.ln_sigma_excess(u))
    }

    pub fn sigma_alpha(&self, u: f64) -> Result<f64> {
        self.log_sigma_alpha(u).map(f64::exp)
    }

    /// Mode of φ_α (computed on first use).
    pub fn mode(&self) -> f64 {
        *self.mode.get_or_init(|| density::locate_mode(self))
    }

    /// Tabulated ln φ_α (built on first use; `None` if quadrature failed).
    pub(crate) fn phi_grid(&self) -> Option<&PhiGrid> {
        self.grid.get_or_init(|| density::build_grid(self).ok()).as_ref()
    }
}
