//! Splitting a Lévy density into a tilted stable-like head and a finite remainder.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::bisect;

pub type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const GRID_POINTS: usize = 2000;

pub struct Decomposition {
    pub b_tilt: f64,
    pub r: f64,
    /// ξ̄(t) = ϖ₂(t) − e^{−b t} ϖ₁(t) 1{t ≤ r}.
    pub xi_bar: Density,
}

/// Writes ϖ₂(t) = e^{−bt}ϖ₁(t)1{t≤r} + ξ̄(t) given the certificate
/// (1 − a₁t)ϖ₁ ≤ ϖ₂ ≤ (1 + a₂t)ϖ₁ on (0, r_cert].
///
/// First tries b = a₁, r = r_cert (exact when ϖ₂ is itself an exponential
/// tilt of ϖ₁). If ξ̄ goes negative on the grid it falls back to b = 2a₁ and
/// the largest r ≤ r_cert with e^{−bt} ≤ 1 − a₁t on (0, r].
pub fn decompose_density(pi2: Density, pi1: Density, a1: f64, a2: f64, r_cert: f64) -> Result<Decomposition> {
    if !(a1 >= 0.0 && a2 >= 0.0 && r_cert > 0.0) {
        return Err(Error::Param(format!("need a1, a2 ≥ 0 and r_cert > 0, got ({a1}, {a2}, {r_cert})")));
    }
    let first = build(pi2.clone(), pi1.clone(), a1, r_cert);
    if a1 == 0.0 {
        validate(&first, &pi1, a2)?;
        return Ok(first);
    }
    if validate(&first, &pi1, a2).is_ok() {
        return Ok(first);
    }
    let b = 2.0 * a1;
    let root = bisect(|t| (-b * t).exp() - (1.0 - a1 * t), 1e-9 / a1, 1.0 / a1, 1e-15 / a1)?;
    let r = r_cert.min(root * (1.0 - 1e-9));
    let second = build(pi2, pi1.clone(), b, r);
    validate(&second, &pi1, a2)?;
    Ok(second)
}

fn build(pi2: Density, pi1: Density, b: f64, r: f64) -> Decomposition {
    let xi_bar: Density = Arc::new(move |t: f64| {
        if t <= r {
            pi2(t) - (-b * t).exp() * pi1(t)
        } else {
            pi2(t)
        }
    });
    Decomposition { b_tilt: b, r, xi_bar }
}

/// Log grid on [r·1e−9, r·1e3] of `GRID_POINTS` points.
pub fn validation_grid(r: f64) -> Vec<f64> {
    let (lo, hi) = ((r * 1e-9).ln(), (r * 1e3).ln());
    (0..GRID_POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}

fn validate(d: &Decomposition, pi1: &Density, a2: f64) -> Result<()> {
    for t in validation_grid(d.r) {
        let x = (d.xi_bar)(t);
        let scale = pi1(t).abs().max(f64::MIN_POSITIVE);
        if x < -1e-12 * scale {
            return Err(Error::Certificate(t));
        }
        if t < d.r && x > (a2 + d.b_tilt) * t * pi1(t) * (1.0 + 1e-9) + 1e-12 * scale {
            return Err(Error::Certificate(t));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caputo_pair() -> (Density, Density) {
        let vt = 1.0 / -crate::numerics::gamma(-0.65);
        let pi2: Density = Arc::new(move |s: f64| if s < 1.0 { vt * (-s).exp() * s.powf(-1.65) } else { s.powf(-5.0) });
        let pi1: Density = Arc::new(move |s: f64| vt * s.powf(-1.65));
        (pi2, pi1)
    }

    #[test]
    fn identity_case() {
        let f: Density = Arc::new(|t: f64| t.powf(-1.5));
        let d = decompose_density(f.clone(), f, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(d.b_tilt, 0.0);
        assert_eq!(d.r, 1.0);
        assert_eq!((d.xi_bar)(0.5), 0.0);
        assert_eq!((d.xi_bar)(2.0), 2f64.powf(-1.5));
    }

    #[test]
    fn caputo_measure() {
        let (pi2, pi1) = caputo_pair();
        let d = decompose_density(pi2.clone(), pi1.clone(), 1.0, 0.0, 1.0).unwrap();
        assert_eq!(d.b_tilt, 1.0);
        assert_eq!(d.r, 1.0);
        for &s in &[1e-6, 0.3, 0.99] {
            assert!((d.xi_bar)(s).abs() < 1e-12 * pi1(s));
        }
        for &s in &[1.0001, 2.0, 10.0] {
            assert!(((d.xi_bar)(s) - s.powf(-5.0)).abs() < 1e-15);
        }
        for t in validation_grid(d.r) {
            let head = if t <= d.r { (-d.b_tilt * t).exp() * pi1(t) } else { 0.0 };
            let recon = head + (d.xi_bar)(t);
            assert!((recon - pi2(t)).abs() <= 1e-12 * pi2(t).abs());
        }
    }

    #[test]
    fn fallback_when_tilt_is_not_exact() {
        // ϖ₂ = (1 − t)ϖ₁ near 0: b = a₁ leaves a negative remainder.
        let pi1: Density = Arc::new(|t: f64| t.powf(-1.5));
        let pi2: Density = Arc::new(|t: f64| if t < 1.0 { (1.0 - t) * t.powf(-1.5) } else { 0.0 });
        let d = decompose_density(pi2, pi1, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(d.b_tilt, 2.0);
        assert!(d.r < 1.0);
        for i in 1..100 {
            let t = d.r * i as f64 / 100.0;
            assert!((-d.b_tilt * t).exp() <= 1.0 - t + 1e-15);
        }
    }

    #[test]
    fn bad_certificate_rejected() {
        let pi1: Density = Arc::new(|t: f64| t.powf(-1.5));
        let pi2: Density = Arc::new(|t: f64| 0.5 * t.powf(-1.5));
        match decompose_density(pi2, pi1, 0.0, 0.0, 1.0) {
            Err(Error::Certificate(t)) => assert!(t > 0.0),
            other => panic!("expected rejection, got {:?}", other.map(|d| d.b_tilt)),
        }
    }
}
