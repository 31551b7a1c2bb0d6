//! Finite jump measures (the compound-Poisson component).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_log};
use crate::rng::RngStream;

pub type JumpSampler = Arc<dyn Fn(&mut RngStream) -> f64 + Send + Sync>;
pub type Transform = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One component of a finite measure on (0, ∞).
#[derive(Clone)]
pub enum Part {
    /// `mass * rate * exp(-rate x) dx`.
    Exponential { rate: f64, mass: f64 },
    /// `scale * x^(-exponent-1) dx` on `[cut, ∞)`.
    Pareto { exponent: f64, cut: f64, scale: f64 },
    /// `mass` at the single point `at`.
    Point { at: f64, mass: f64 },
    /// `vartheta * exp(-q x) x^(-alpha-1) dx` on `(lo, hi]`.
    TemperedTail { vartheta: f64, alpha: f64, q: f64, lo: f64, hi: f64, mass: f64 },
    /// User-supplied law with the given mass.
    Custom { mass: f64, sampler: JumpSampler, transform: Transform },
}

impl fmt::Debug for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Part::Exponential { rate, mass } => write!(f, "Exponential(rate={rate}, mass={mass})"),
            Part::Pareto { exponent, cut, scale } => write!(f, "Pareto(exponent={exponent}, cut={cut}, scale={scale})"),
            Part::Point { at, mass } => write!(f, "Point(at={at}, mass={mass})"),
            Part::TemperedTail { lo, hi, mass, .. } => write!(f, "TemperedTail(lo={lo}, hi={hi}, mass={mass})"),
            Part::Custom { mass, .. } => write!(f, "Custom(mass={mass})"),
        }
    }
}

impl Part {
    pub fn mass(&self) -> f64 {
        match self {
            Part::Exponential { mass, .. } | Part::Point { mass, .. } | Part::TemperedTail { mass, .. } => *mass,
            Part::Pareto { exponent, cut, scale } => scale * cut.powf(-exponent) / exponent,
            Part::Custom { mass, .. } => *mass,
        }
    }

    fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Part::Exponential { rate, .. } => rng.exp1() / rate,
            Part::Pareto { exponent, cut, .. } => cut * rng.uniform().powf(-1.0 / exponent),
            Part::Point { at, .. } => *at,
            Part::TemperedTail { alpha, q, lo, hi, .. } => sample_tempered_tail(*alpha, *q, *lo, *hi, rng),
            Part::Custom { sampler, .. } => sampler(rng),
        }
    }

    /// ∫ (1 - e^{-ux}) part(dx).
    fn mean_transform(&self, u: f64) -> f64 {
        match self {
            Part::Exponential { rate, mass } => mass * u / (rate + u),
            Part::Point { at, mass } => -mass * (-u * at).exp_m1(),
            Part::Pareto { exponent, cut, scale } => {
                let a = *exponent;
                let f = |x: f64| -(-u * x).exp_m1() * x.powf(-a - 1.0);
                scale * integrate_log(f, *cut, f64::INFINITY, 1e-11).unwrap_or(f64::NAN)
            }
            Part::TemperedTail { vartheta, alpha, q, lo, hi, .. } => {
                let f = |x: f64| -(-u * x).exp_m1() * (-q * x).exp() * x.powf(-alpha - 1.0);
                vartheta * integrate_log(f, *lo, *hi, 1e-11).unwrap_or(f64::NAN)
            }
            Part::Custom { transform, .. } => transform(u),
        }
    }
}

/// Sampler for the law ∝ e^{-qx} x^{-α-1} on (lo, hi]. Exponential proposal
/// with a power-ratio test when `q lo ≥ 1`, Pareto proposal with a tilt test
/// otherwise.
pub fn sample_tempered_tail(alpha: f64, q: f64, lo: f64, hi: f64, rng: &mut RngStream) -> f64 {
    if q * lo >= 1.0 {
        let span = hi - lo;
        loop {
            let u = rng.uniform();
            let e = if span.is_finite() {
                -(-u * -(-q * span).exp_m1()).ln_1p() / q
            } else {
                -(-u).ln_1p() / q
            };
            let x = lo + e;
            if rng.uniform() <= (lo / x).powf(alpha + 1.0) {
                return x;
            }
        }
    } else {
        let ratio = if hi.is_finite() { (lo / hi).powf(alpha) } else { 0.0 };
        loop {
            let u = rng.uniform();
            let x = lo * (1.0 - u * (1.0 - ratio)).powf(-1.0 / alpha);
            let x = if x > hi { hi } else { x };
            if q == 0.0 || rng.uniform() <= (-q * (x - lo)).exp() {
                return x;
            }
        }
    }
}

/// ∫_lo^hi ϑ e^{-qx} x^{-α-1} dx.
pub fn tempered_tail_mass(vartheta: f64, alpha: f64, q: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo > 0.0) || !(hi >= lo) {
        return Err(Error::Param(format!("tail range ({lo}, {hi}] is invalid")));
    }
    if hi == lo {
        return Ok(0.0);
    }
    let m = if q == 0.0 {
        let upper = if hi.is_finite() { hi.powf(-alpha) } else { 0.0 };
        vartheta * (lo.powf(-alpha) - upper) / alpha
    } else {
        vartheta * integrate_log(|x: f64| (-q * x).exp() * x.powf(-alpha - 1.0), lo, hi, 1e-12)?
    };
    if !m.is_finite() {
        return Err(Error::Numeric(format!("tail mass on ({lo}, {hi}] is not finite")));
    }
    Ok(m)
}

/// Finite Lévy measure with total mass Λ, a sampler for Λ^{-1}·measure, and
/// the transform u ↦ ∫(1 − e^{−ux}) measure(dx).
#[derive(Clone, Debug, Default)]
pub struct FiniteMeasure {
    parts: Vec<Part>,
}

impl FiniteMeasure {
    pub fn none() -> Self {
        Self { parts: Vec::new() }
    }

    /// The measure e^{-rate·x} dx (mass 1/rate).
    pub fn exp(rate: f64) -> Result<Self> {
        Self::exp_with_mass(rate, 1.0 / rate)
    }

    pub fn exp_with_mass(rate: f64, mass: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) || !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Param(format!("exp preset needs rate > 0 and mass ≥ 0, got rate={rate}, mass={mass}")));
        }
        Ok(Self::from_part(Part::Exponential { rate, mass }))
    }

    /// The measure x^{-exponent-1} dx on [cut, ∞).
    pub fn pareto(exponent: f64, cut: f64) -> Result<Self> {
        if !(exponent > 0.0 && cut > 0.0 && cut.is_finite()) {
            return Err(Error::Param(format!("pareto preset needs exponent > 0 and cut > 0, got ({exponent}, {cut})")));
        }
        Ok(Self::from_part(Part::Pareto { exponent, cut, scale: 1.0 }))
    }

    pub fn point(at: f64, mass: f64) -> Result<Self> {
        if !(at > 0.0 && at.is_finite() && mass >= 0.0) {
            return Err(Error::Param(format!("point mass needs at > 0, mass ≥ 0, got ({at}, {mass})")));
        }
        Ok(Self::from_part(Part::Point { at, mass }))
    }

    pub fn custom(mass: f64, sampler: JumpSampler, transform: Transform) -> Result<Self> {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Param(format!("custom measure needs a finite mass ≥ 0, got {mass}")));
        }
        Ok(Self::from_part(Part::Custom { mass, sampler, transform }))
    }

    pub fn tempered_tail(vartheta: f64, alpha: f64, q: f64, lo: f64, hi: f64) -> Result<Self> {
        let mass = tempered_tail_mass(vartheta, alpha, q, lo, hi)?;
        Ok(Self::from_part(Part::TemperedTail { vartheta, alpha, q, lo, hi, mass }))
    }

    fn from_part(p: Part) -> Self {
        if p.mass() > 0.0 {
            Self { parts: vec![p] }
        } else {
            Self::none()
        }
    }

    /// Sum of two measures.
    pub fn plus(mut self, other: FiniteMeasure) -> Self {
        self.parts.extend(other.parts);
        self
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn mass(&self) -> f64 {
        self.parts.iter().map(Part::mass).fold(0.0, |a, m| a + m)
    }

    /// One jump size drawn from measure/mass. Must not be called when the
    /// mass is zero.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        debug_assert!(self.mass() > 0.0, "sampler invoked on a zero-mass measure");
        if self.parts.len() == 1 {
            return self.parts[0].sample(rng);
        }
        let total = self.mass();
        let mut pick = rng.uniform() * total;
        for p in &self.parts {
            let m = p.mass();
            if pick < m {
                return p.sample(rng);
            }
            pick -= m;
        }
        self.parts.last().expect("non-empty").sample(rng)
    }

    pub fn mean_transform(&self, u: f64) -> f64 {
        self.parts.iter().map(|p| p.mean_transform(u)).fold(0.0, |a, m| a + m)
    }

    /// E[e^{-uJ}] for J drawn from the normalised measure.
    pub fn laplace(&self, u: f64) -> f64 {
        let m = self.mass();
        if m == 0.0 {
            return 1.0;
        }
        1.0 - self.mean_transform(u) / m
    }

    /// Quadrature cross-check of `mean_transform` for the closed-form parts.
    pub fn mean_transform_quadrature(&self, u: f64) -> f64 {
        self.parts
            .iter()
            .map(|p| match p {
                Part::Exponential { rate, mass } => {
                    mass * rate
                        * integrate(|x: f64| -(-u * x).exp_m1() * (-rate * x).exp(), 0.0, f64::INFINITY, 1e-12)
                            .unwrap_or(f64::NAN)
                }
                other => other.mean_transform(u),
            })
            .sum()
    }
}
