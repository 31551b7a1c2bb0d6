//! Moment identities and hitting-time bounds.

use serde::Serialize;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::model::{Boundary, EngineConfig, SubordinatorSpec};
use crate::passage::FptsSampler;
use crate::rng::RngStream;

use super::stats::{mean, std_error};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LaplaceCheck {
    pub estimate: f64,
    pub reference: f64,
    pub z_score: f64,
}

/// Mean of e^{−u·Sᵢ} against exp((q^α − (u+q)^α)θt).
pub fn laplace_check(samples: &[f64], u: f64, alpha: f64, theta: f64, q: f64, t: f64) -> LaplaceCheck {
    let vals: Vec<f64> = samples.iter().map(|s| (-u * s).exp()).collect();
    let estimate = mean(&vals);
    let se = std_error(&vals);
    let reference = ((q.powf(alpha) - (u + q).powf(alpha)) * theta * t).exp();
    let z_score = if se > 0.0 { (estimate - reference) / se } else if estimate == reference { 0.0 } else { f64::INFINITY };
    LaplaceCheck { estimate, reference, z_score }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HittingReport {
    pub c0: f64,
    pub u: f64,
    pub n: usize,
    pub mean_tau: f64,
    pub se_tau: f64,
    /// e^{uc₀}/ψ_Z(u)
    pub tau_bound: f64,
    pub mean_steps: f64,
    pub se_steps: f64,
    /// e^{uc₀}/(1 − E e^{−uJ}) for the jump chain of the finite part.
    pub steps_bound: f64,
    pub pass: bool,
}

/// Number of jumps a walk with steps drawn from the normalized finite
/// part needs to exceed `c0`.
pub fn jump_chain_steps(spec: &SubordinatorSpec, c0: f64, rng: &mut RngStream) -> u64 {
    let mut sum = 0.0;
    let mut k = 0;
    while sum <= c0 {
        sum += spec.finite_part.sample(rng);
        k += 1;
    }
    k
}

/// Estimates E[τ] with the engine and the mean number of jump-chain steps,
/// and compares both with their bounds at u = 1/(1+c₀) (3·SE slack).
pub fn hitting_bound_check(
    spec: &SubordinatorSpec,
    c0: f64,
    n: usize,
    cfg: &EngineConfig,
    fpts: &dyn FptsSampler,
    rng: &mut RngStream,
) -> Result<HittingReport> {
    if n < 2 {
        return Err(Error::Param("hitting_bound_check needs n ≥ 2".into()));
    }
    let u = 1.0 / (1.0 + c0);
    let engine = Engine::new(spec, cfg, fpts)?;
    let c = Boundary::constant(c0)?;
    let mut taus = Vec::with_capacity(n);
    for _ in 0..n {
        taus.push(engine.sample(&c, rng)?.t);
    }
    let tau_bound = (u * c0).exp() / spec.laplace_exponent(u)?;
    let (mean_steps, se_steps, steps_bound) = if spec.lambda_r() > 0.0 {
        let steps: Vec<f64> = (0..n).map(|_| jump_chain_steps(spec, c0, rng) as f64).collect();
        (mean(&steps), std_error(&steps), (u * c0).exp() / (1.0 - spec.finite_part.laplace(u)))
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let (mean_tau, se_tau) = (mean(&taus), std_error(&taus));
    let tau_ok = mean_tau - 3.0 * se_tau <= tau_bound;
    let steps_ok = steps_bound.is_nan() || mean_steps - 3.0 * se_steps <= steps_bound;
    Ok(HittingReport {
        c0,
        u,
        n,
        mean_tau,
        se_tau,
        tau_bound,
        mean_steps,
        se_steps,
        steps_bound,
        pass: tau_ok && steps_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FiniteMeasure;

    #[test]
    fn reference_values() {
        let r = laplace_check(&[0.0, 0.0], 1.0, 0.5, 1.0, 0.0, 1.0);
        assert!((r.reference - (-1.0f64).exp()).abs() < 1e-15);
        let r = laplace_check(&[1.0], 1.0, 0.5, 1.0, 1.0, 1.0);
        assert!((r.reference - (1.0 - 2f64.sqrt()).exp()).abs() < 1e-15);
        let r = laplace_check(&[3.0, 4.0], 1e-12, 0.5, 1.0, 0.0, 1.0);
        assert!((r.reference - 1.0).abs() < 1e-5 && (r.estimate - 1.0).abs() < 1e-10);
    }

    #[test]
    fn point_mass_walk_takes_three_steps() {
        let spec = SubordinatorSpec::new(0.5, 1.0, 0.0, 1.0, 1.0, FiniteMeasure::point(1.0, 1.0).unwrap()).unwrap();
        let mut rng = RngStream::new(0);
        for _ in 0..10 {
            assert_eq!(jump_chain_steps(&spec, 2.5, &mut rng), 3);
        }
        let u: f64 = 1.0 / 3.5;
        let bound = (u * 2.5).exp() / (1.0 - spec.finite_part.laplace(u));
        assert!(3.0 <= bound);
    }
}
