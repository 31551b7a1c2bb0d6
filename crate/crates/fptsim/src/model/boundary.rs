//! Non-increasing boundaries and the shift/cap update used by the main loop.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type CurveFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Curve {
    Constant(f64),
    /// `max(c0 - slope * t, 0)` with `slope ≥ 0`.
    Linear { c0: f64, slope: f64 },
    /// Caller-supplied non-increasing function.
    Custom(CurveFn),
}

impl Curve {
    #[inline]
    fn eval(&self, t: f64) -> f64 {
        match self {
            Curve::Constant(c) => *c,
            Curve::Linear { c0, slope } => (c0 - slope * t).max(0.0),
            Curve::Custom(f) => f(t),
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match self {
            Curve::Constant(_) => 0.0,
            Curve::Linear { c0, slope } => {
                if c0 - slope * t > 0.0 {
                    -slope
                } else {
                    0.0
                }
            }
            Curve::Custom(f) => {
                let h = 1e-6 * t.abs().max(1e-3);
                let lo = (t - h).max(0.0);
                (f(t + h) - f(lo)) / (t + h - lo)
            }
        }
    }
}

/// `t ↦ min(curve(t + t_shift) − v_shift, cap)`.
#[derive(Clone)]
pub struct Boundary {
    curve: Curve,
    t_shift: f64,
    v_shift: f64,
    cap: f64,
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.curve {
            Curve::Constant(c) => format!("const({c})"),
            Curve::Linear { c0, slope } => format!("linear({c0},{slope})"),
            Curve::Custom(_) => "custom".to_string(),
        };
        f.debug_struct("Boundary")
            .field("curve", &kind)
            .field("t_shift", &self.t_shift)
            .field("v_shift", &self.v_shift)
            .field("cap", &self.cap)
            .finish()
    }
}

impl Boundary {
    pub fn constant(c0: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::Param(format!("boundary needs c(0) > 0, got {c0}")));
        }
        Ok(Self::from_curve(Curve::Constant(c0)))
    }

    pub fn linear(c0: f64, slope: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) || !(slope >= 0.0 && slope.is_finite()) {
            return Err(Error::Param(format!("linear boundary needs c0 > 0 and slope ≥ 0, got ({c0}, {slope})")));
        }
        if slope == 0.0 {
            return Self::constant(c0);
        }
        Ok(Self::from_curve(Curve::Linear { c0, slope }))
    }

    /// Wraps a caller-supplied function. Monotonicity is the caller's
    /// contract; see [`Boundary::check_monotone`].
    pub fn custom(f: CurveFn) -> Result<Self> {
        let c0 = f(0.0);
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::Param(format!("boundary needs c(0) > 0, got {c0}")));
        }
        Ok(Self::from_curve(Curve::Custom(f)))
    }

    fn from_curve(curve: Curve) -> Self {
        Self {
            curve,
            t_shift: 0.0,
            v_shift: 0.0,
            cap: f64::INFINITY,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.curve.eval(t + self.t_shift) - self.v_shift).min(self.cap)
    }

    pub fn c0(&self) -> f64 {
        self.eval(0.0)
    }

    /// Right derivative at `t`; zero where the cap is active.
    pub fn derivative(&self, t: f64) -> f64 {
        if self.curve.eval(t + self.t_shift) - self.v_shift >= self.cap {
            0.0
        } else {
            self.curve.derivative(t + self.t_shift)
        }
    }

    /// `Some(level)` when the boundary is constant in time.
    pub fn constant_level(&self) -> Option<f64> {
        match self.curve {
            Curve::Constant(c) => Some((c - self.v_shift).min(self.cap)),
            _ => None,
        }
    }

    /// `t ↦ min(self(t + t_shift) − v_shift, cap)`.
    pub fn update(&self, t_shift: f64, v_shift: f64, cap: f64) -> Boundary {
        Boundary {
            curve: self.curve.clone(),
            t_shift: self.t_shift + t_shift,
            v_shift: self.v_shift + v_shift,
            cap: (self.cap - v_shift).min(cap),
        }
    }

    /// Time shift only: `t ↦ self(t + dt) − dv`.
    pub fn shifted(&self, dt: f64, dv: f64) -> Boundary {
        self.update(dt, dv, f64::INFINITY)
    }

    /// Spot check of the non-increasing contract on `n` points of `[0, horizon]`.
    pub fn check_monotone(&self, horizon: f64, n: usize) -> Result<()> {
        let mut prev = self.eval(0.0);
        for i in 1..=n {
            let t = horizon * i as f64 / n as f64;
            let v = self.eval(t);
            if v > prev * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::Precondition(format!("boundary increases near t = {t}")));
            }
            prev = v;
        }
        Ok(())
    }

    /// Largest value on `n + 1` grid points of `[0, horizon]`.
    pub fn sup_on_grid(&self, horizon: f64, n: usize) -> f64 {
        (0..=n).map(|i| self.eval(horizon * i as f64 / n as f64)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `t ↦ min(c(t + t_shift) − v_shift, cap)`; the result may start at or below 0.
pub fn boundary_update(c: &Boundary, t_shift: f64, v_shift: f64, cap: f64) -> Boundary {
    c.update(t_shift, v_shift, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_update() {
        let c = Boundary::linear(3.0, 0.5).unwrap();
        let b = boundary_update(&c, 0.0, 0.0, f64::INFINITY);
        for i in 0..20 {
            let t = i as f64 * 0.4;
            assert_eq!(b.eval(t), c.eval(t));
        }
    }

    #[test]
    fn termination_signal_and_cap() {
        let c = Boundary::constant(5.0).unwrap();
        assert_eq!(boundary_update(&c, 0.0, 5.0, f64::INFINITY).c0(), 0.0);
        let b = boundary_update(&c, 0.0, 0.0, 0.05);
        assert_eq!(b.eval(0.0), 0.05);
        assert_eq!(b.eval(100.0), 0.05);
        assert_eq!(b.constant_level(), Some(0.05));
    }

    #[test]
    fn nested_updates_compose() {
        let c = Boundary::linear(4.0, 1.0).unwrap();
        let once = c.update(0.5, 1.0, 2.0).update(0.25, 0.5, 1.8);
        for i in 0..10 {
            let t = i as f64 * 0.3;
            let direct = ((c.eval(t + 0.75) - 1.5).min(2.0 - 0.5)).min(1.8);
            assert!((once.eval(t) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_derivative_respects_cap() {
        let c = Boundary::linear(4.0, 1.0).unwrap().update(0.0, 0.0, 1.0);
        assert_eq!(c.derivative(0.5), 0.0);
        assert_eq!(c.derivative(3.5), -1.0);
        let custom = Boundary::custom(Arc::new(|t: f64| 2.0 - 0.5 * t)).unwrap();
        assert!((custom.derivative(1.0) + 0.5).abs() < 1e-8);
    }

    #[test]
    fn monotone_check_flags_increase() {
        let bad = Boundary::custom(Arc::new(|t: f64| 1.0 + t)).unwrap();
        assert!(bad.check_monotone(1.0, 100).is_err());
        assert!(Boundary::linear(1.0, 2.0).unwrap().check_monotone(5.0, 1000).is_ok());
        assert!(Boundary::constant(0.0).is_err());
    }
}
