//! Monte Carlo for the Caputo-type FPDE (−D + A)u = −g through its
//! Feynman–Kac representation, with an Ornstein–Uhlenbeck space part.
//!
//! With a = 0 and t the horizon, u(t, x) = E[φ(X_{T}) + ∫₀^{T} g(t − Z_s, X_s) ds]
//! where T is the first passage of the subordinator Z over the level t and X
//! is the OU process dX = −X ds + γ dW started at x, independent of Z.

use std::io::Write;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{default_fpts, Engine};
use crate::error::{Error, Result};
use crate::model::{Boundary, EngineConfig, FiniteMeasure, SubordinatorSpec};
use crate::numerics::gamma;
use crate::rng::RngStream;

pub type Terminal = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
/// g(time, x), with time = t − Z_s.
pub type Source = Arc<dyn Fn(f64, [f64; 2]) -> f64 + Send + Sync>;

/// Σ = γγᵀ of the OU noise.
pub const OU_SIGMA: [[f64; 2]; 2] = [[2.0, 1.0], [1.0, 1.0]];

pub const CAPUTO_ALPHA: f64 = 0.65;

/// ν(ds) = ϑ 1{0<s<1} e^{−s} s^{−1.65} ds + 1{s≥1} s^{−5} ds with ϑ = 1/(−Γ(−0.65)),
/// so r = r₀ = 1 and λ₁ has mass 1/4.
pub fn caputo_spec() -> Result<SubordinatorSpec> {
    let a = CAPUTO_ALPHA;
    let vartheta = -1.0 / gamma(-a);
    SubordinatorSpec::new(a, vartheta, 1.0, 1.0, 1.0, FiniteMeasure::pareto(4.0, 1.0)?)
}

/// φ(x) = x₁ + x₂².
pub fn default_phi() -> Terminal {
    Arc::new(|x| x[0] + x[1] * x[1])
}

#[derive(Clone)]
pub struct FpdeProblem {
    pub horizon: f64,
    pub phi: Terminal,
    pub g: Option<Source>,
    pub spec: SubordinatorSpec,
}

impl FpdeProblem {
    pub fn new(horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::Param(format!("horizon must be finite and ≥ 0, got {horizon}")));
        }
        Ok(Self { horizon, phi: default_phi(), g: None, spec: caputo_spec()? })
    }

    pub fn with_phi(mut self, phi: Terminal) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_source(mut self, g: Source) -> Self {
        self.g = Some(g);
        self
    }
}

/// Cholesky factor of Σ·k.
fn chol_scaled(k: f64) -> [[f64; 2]; 2] {
    let [[a, b], [_, d]] = OU_SIGMA;
    let l11 = (a * k).sqrt();
    let l21 = b * k / l11;
    let l22 = (d * k - l21 * l21).max(0.0).sqrt();
    [[l11, 0.0], [l21, l22]]
}

/// X_s given X_0 = x: N(e^{−s}x, Σ(1 − e^{−2s})/2).
pub fn ou_marginal(x: [f64; 2], s: f64, rng: &mut RngStream) -> [f64; 2] {
    let decay = (-s).exp();
    let l = chol_scaled(-0.5 * (-2.0 * s).exp_m1());
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    [decay * x[0] + l[0][0] * z1, decay * x[1] + l[1][0] * z1 + l[1][1] * z2]
}

/// E φ(X_s) for the default φ: e^{−s}x₁ + e^{−2s}x₂² + (1 − e^{−2s})/2.
pub fn ou_mean_phi(x: [f64; 2], s: f64) -> f64 {
    let e2 = (-2.0 * s).exp();
    (-s).exp() * x[0] + e2 * x[1] * x[1] + 0.5 * (1.0 - e2)
}

/// {−1, 0, 1}².
pub fn default_grid() -> Vec<[f64; 2]> {
    let v = [-1.0, 0.0, 1.0];
    v.iter().flat_map(|&a| v.iter().map(move |&b| [a, b])).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FpdeRow {
    pub x1: f64,
    pub x2: f64,
    pub estimate: f64,
    /// 1.96 standard errors
    pub ci_half_width: f64,
    /// draws used; 0 at horizon 0
    pub n: usize,
    pub std_error: f64,
    /// conditional expectation of the default φ given T
    pub rao_blackwell: f64,
    pub rao_blackwell_se: f64,
    pub mean_exp_t: f64,
    pub mean_exp_2t: f64,
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// One path: φ(X_T) plus the left-endpoint g-sum over the engine's
/// checkpoints, and T itself.
fn one_draw(problem: &FpdeProblem, engine: &Engine, c: &Boundary, x: [f64; 2], rng: &mut RngStream) -> Result<(f64, f64)> {
    match &problem.g {
        None => {
            let tau = engine.sample(c, rng)?.t;
            let xt = ou_marginal(x, tau, rng);
            Ok(((problem.phi)(xt), tau))
        }
        Some(g) => {
            let (out, trace) = engine.sample_traced(c, rng)?;
            let mut xs = x;
            let mut acc = 0.0;
            for w in trace.windows(2) {
                let ((s0, z0), (s1, _)) = (w[0], w[1]);
                acc += g(problem.horizon - z0, xs) * (s1 - s0);
                xs = ou_marginal(xs, s1 - s0, rng);
            }
            Ok(((problem.phi)(xs) + acc, out.t))
        }
    }
}

fn estimate_point(problem: &FpdeProblem, engine: &Engine, x: [f64; 2], n: usize, rng: &mut RngStream) -> Result<FpdeRow> {
    let c = Boundary::constant(problem.horizon)?;
    let mut vals = Vec::with_capacity(n);
    let mut rb = Vec::with_capacity(n);
    let (mut e1, mut e2) = (0.0, 0.0);
    for _ in 0..n {
        let (v, tau) = one_draw(problem, engine, &c, x, rng)?;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("non-finite value {v} at x = ({}, {})", x[0], x[1])));
        }
        vals.push(v);
        rb.push(ou_mean_phi(x, tau));
        e1 += (-tau).exp();
        e2 += (-2.0 * tau).exp();
    }
    let (m, se) = mean_se(&vals);
    let (rb_m, rb_se) = mean_se(&rb);
    Ok(FpdeRow {
        x1: x[0],
        x2: x[1],
        estimate: m,
        ci_half_width: 1.96 * se,
        n,
        std_error: se,
        rao_blackwell: rb_m,
        rao_blackwell_se: rb_se,
        mean_exp_t: e1 / n as f64,
        mean_exp_2t: e2 / n as f64,
    })
}

fn exact_row(problem: &FpdeProblem, x: [f64; 2]) -> Result<FpdeRow> {
    let v = (problem.phi)(x);
    if !v.is_finite() {
        return Err(Error::Numeric(format!("non-finite value {v} at x = ({}, {})", x[0], x[1])));
    }
    Ok(FpdeRow {
        x1: x[0],
        x2: x[1],
        estimate: v,
        ci_half_width: 0.0,
        n: 0,
        std_error: 0.0,
        rao_blackwell: ou_mean_phi(x, 0.0),
        rao_blackwell_se: 0.0,
        mean_exp_t: 1.0,
        mean_exp_2t: 1.0,
    })
}

/// u_n(t, x) at every grid point; point i draws from `rng.split(i)`.
pub fn fpde_estimate(problem: &FpdeProblem, grid: &[[f64; 2]], n: usize, cfg: &EngineConfig, rng: &RngStream) -> Result<Vec<FpdeRow>> {
    if n < 100 {
        return Err(Error::Param(format!("need n ≥ 100 draws per point, got {n}")));
    }
    if problem.horizon == 0.0 {
        return grid.iter().map(|&x| exact_row(problem, x)).collect();
    }
    let fpts = default_fpts(&problem.spec)?;
    let engine = Engine::new(&problem.spec, cfg, &fpts)?;
    grid.par_iter()
        .enumerate()
        .map(|(i, &x)| estimate_point(problem, &engine, x, n, &mut rng.split(i as u64)))
        .collect()
}

pub const FPDE_COLUMNS: [&str; 5] = ["x1", "x2", "estimate", "ci_half_width", "n"];

pub fn write_fpde_csv<W: Write>(rows: &[FpdeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FPDE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.x1.to_string(),
            r.x2.to_string(),
            r.estimate.to_string(),
            r.ci_half_width.to_string(),
            r.n.to_string(),
        ])
        ?;
    }
    w.flush()?;
    Ok(())
}
