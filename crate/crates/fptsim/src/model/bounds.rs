//! Closed-form quantities entering the running-time bound.

use crate::error::{Error, Result};
use crate::model::measure::tempered_tail_mass;
use crate::model::spec::SubordinatorSpec;

/// Λ_r = Λ_{r₀} + ∫_r^{r₀} ϑ e^{−qx} x^{−α−1} dx.
pub fn lambda_mass(spec: &SubordinatorSpec, lambda_r0_mass: f64) -> Result<f64> {
    if !(spec.r > 0.0 && spec.r <= spec.r0) {
        return Err(Error::Precondition(format!("need 0 < r ≤ r0, got r={}, r0={}", spec.r, spec.r0)));
    }
    let v = lambda_r0_mass + tempered_tail_mass(spec.vartheta, spec.alpha, spec.q, spec.r, spec.r0)?;
    if !v.is_finite() {
        return Err(Error::Numeric(format!("Λ_r evaluated to {v}")));
    }
    Ok(v)
}

/// Λ_{r₀} + ϑ(r^{−α} − r₀^{−α})/α.
pub fn lambda_mass_upper(spec: &SubordinatorSpec, lambda_r0_mass: f64) -> f64 {
    let top = if spec.r0.is_finite() { spec.r0.powf(-spec.alpha) } else { 0.0 };
    lambda_r0_mass + spec.vartheta * (spec.r.powf(-spec.alpha) - top) / spec.alpha
}

/// Υ(u, r, q), a lower bound for ∫_0^r (1 − e^{−ux}) e^{−qx} x^{−α−1} dx.
pub fn upsilon(u: f64, r: f64, q: f64) -> f64 {
    let s = r.min(1.0);
    let v = if u + q < 1.0 / s {
        u * s
    } else if q < 1.0 / s {
        1.0 - s * q + ((u + q) * s).ln()
    } else {
        (u / q).ln_1p()
    };
    0.5 * v
}

/// Denominator ψ₀ + ϑΥ(1/(1+c₀), r₀, q) shared by the bracket and the K bound.
fn rate_floor(spec: &SubordinatorSpec, c0: f64, psi0: f64) -> f64 {
    let d = psi0 + spec.vartheta * upsilon(1.0 / (1.0 + c0), spec.r0, spec.q);
    assert!(d > 0.0, "Υ(u,·,·) > 0 for u > 0");
    d
}

/// (T₀/(1−ρ^α) + e^{q·min(c₀, rρ)}) · (Λ_r/(ψ₀ + ϑΥ(1/(1+c₀), r₀, q)) + c₀/(rρ)),
/// the bound without its unspecified constant.
pub fn complexity_bracket(spec: &SubordinatorSpec, c0: f64, rho: f64, t0: f64, psi0: f64) -> f64 {
    let a = t0 / (1.0 - rho.powf(spec.alpha)) + (spec.q * c0.min(spec.r * rho)).exp();
    let b = spec.lambda_r() / rate_floor(spec, c0, psi0) + c0 / (spec.r * rho);
    a * b
}

/// 2e·Λ_r/(ψ₀ + ϑΥ(1/(1+c₀), r₀, q)), a bound on E[K].
pub fn cpp_jump_bound(spec: &SubordinatorSpec, c0: f64, psi0: f64) -> f64 {
    2.0 * std::f64::consts::E * spec.lambda_r() / rate_floor(spec, c0, psi0)
}

/// ψ₀ = ∫(1 − e^{−x/(1+c₀)}) λ_{r₀}(dx).
pub fn psi0(spec: &SubordinatorSpec, c0: f64) -> f64 {
    spec.base.mean_transform(1.0 / (1.0 + c0))
}

/// max(1, ⌈c₀/(rρ)⌉): iterations available to the stable part of the loop.
pub fn loop_allowance(c0: f64, r: f64, rho: f64) -> u64 {
    let k = (c0 / (r * rho)).ceil();
    if k.is_finite() && k >= 1.0 {
        k as u64
    } else {
        1
    }
}
