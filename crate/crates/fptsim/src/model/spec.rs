//! Subordinator parameters and engine configuration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::measure::FiniteMeasure;
use crate::numerics::gamma;

/// Parameters (α, ϑ, q, r, r₀) of ν_Z = ν_{r,q} + λ_r, where
/// ν_{r,q}(dx) = 1{0<x≤r} ϑ e^{−qx} x^{−α−1} dx.
///
/// `finite_part` is λ_r: the base measure λ_{r₀} plus the tempered-stable
/// jumps on (r, r₀] that truncation moved out of the small-jump part.
#[derive(Clone, Debug)]
pub struct SubordinatorSpec {
    pub alpha: f64,
    pub vartheta: f64,
    pub q: f64,
    pub r: f64,
    pub r0: f64,
    pub theta: f64,
    pub base: FiniteMeasure,
    pub finite_part: FiniteMeasure,
}

impl SubordinatorSpec {
    pub fn new(alpha: f64, vartheta: f64, q: f64, r: f64, r0: f64, base: FiniteMeasure) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Param(format!("alpha must lie in (0,1), got {alpha}")));
        }
        if !(vartheta > 0.0 && vartheta.is_finite()) {
            return Err(Error::Param(format!("vartheta must be > 0, got {vartheta}")));
        }
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::Param(format!("q must be ≥ 0, got {q}")));
        }
        if !(r0 > 0.0) || r0.is_nan() {
            return Err(Error::Param(format!("r0 must be > 0 (∞ allowed), got {r0}")));
        }
        if !(r > 0.0 && r <= r0) {
            return Err(Error::Param(format!("r must lie in (0, r0], got r={r}, r0={r0}")));
        }
        let tail = if r < r0 {
            FiniteMeasure::tempered_tail(vartheta, alpha, q, r, r0)?
        } else {
            FiniteMeasure::none()
        };
        let finite_part = base.clone().plus(tail);
        let mass = finite_part.mass();
        if !mass.is_finite() {
            return Err(Error::Numeric(format!("Λ_r is not finite ({mass})")));
        }
        Ok(Self {
            alpha,
            vartheta,
            q,
            r,
            r0,
            theta: vartheta * gamma(1.0 - alpha) / alpha,
            base,
            finite_part,
        })
    }

    /// Λ_r.
    pub fn lambda_r(&self) -> f64 {
        self.finite_part.mass()
    }

    /// Λ_{r₀}.
    pub fn lambda_r0(&self) -> f64 {
        self.base.mass()
    }

    /// Same model with a different truncation level.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(self.alpha, self.vartheta, self.q, r, self.r0, self.base.clone())
    }

    /// ψ_Z(u) = ∫(1 − e^{−ux}) ν_Z(dx) by quadrature.
    pub fn laplace_exponent(&self, u: f64) -> Result<f64> {
        let (a, q, r) = (self.alpha, self.q, self.r);
        let f = |x: f64| -(-u * x).exp_m1() * (-q * x).exp() * x.powf(-a - 1.0);
        // the piece below 1e-30·min(r,1) contributes O(u·1e-30^{1−α})
        let small = crate::numerics::integrate_log(f, 1e-30 * r.min(1.0), r, 1e-11)?;
        Ok(self.vartheta * small + self.finite_part.mean_transform(u))
    }

    pub fn summary(&self) -> SpecSummary {
        SpecSummary {
            alpha: self.alpha,
            vartheta: self.vartheta,
            q: self.q,
            r: self.r,
            r0: self.r0,
            theta: self.theta,
            lambda_r: self.lambda_r(),
            lambda_r0: self.lambda_r0(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecSummary {
    pub alpha: f64,
    pub vartheta: f64,
    pub q: f64,
    #[serde(serialize_with = "ser_inf")]
    pub r: f64,
    #[serde(serialize_with = "ser_inf")]
    pub r0: f64,
    pub theta: f64,
    pub lambda_r: f64,
    pub lambda_r0: f64,
}

fn ser_inf<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// How the truncation level r is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RPolicy {
    Explicit(f64),
    /// r = min(r₀, 2α/q), or r₀ when q = 0.
    Auto,
}

impl RPolicy {
    pub fn resolve(&self, alpha: f64, q: f64, r0: f64) -> f64 {
        match *self {
            RPolicy::Explicit(r) => r,
            RPolicy::Auto => {
                if q > 0.0 {
                    r0.min(2.0 * alpha / q)
                } else {
                    r0
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub rho: f64,
    pub precision_bits: u32,
    pub seed: u64,
    pub r_policy: RPolicy,
}

pub const DEFAULT_SEED: u64 = 20_240_917;

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            rho: 0.5,
            precision_bits: 53,
            seed: DEFAULT_SEED,
            r_policy: RPolicy::Auto,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Param(format!("rho must lie in (0,1), got {}", self.rho)));
        }
        Ok(())
    }
}
