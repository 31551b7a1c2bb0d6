//! The acceptance suite: eleven end-to-end checks, each reduced to a
//! statistic, an optional p-value and a verdict.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::engine::{default_fpts, Engine};
use crate::error::Result;
use crate::fpde::{default_grid, fpde_estimate, FpdeProblem};
use crate::model::{
    cpp_jump_bound, loop_allowance, psi0, Boundary, CrossingTriplet, EngineConfig, FiniteMeasure, RPolicy,
    SubordinatorSpec, Tally,
};
use crate::numerics::{integrate, integrate_finite};
use crate::passage::{truncated_triplet, TemperedStableFpts};
use crate::rng::RngStream;
use crate::stable::{phi_density, small_stable_sample, small_tempered_stable_sample, stable_sample, ZolotarevContext};

use super::bench::{bench, fig2_grid, fig3_grid};
use super::checks::{hitting_bound_check, laplace_check};
use super::oracle::{bias_proxy, Oracle, OracleConfig};
use super::stats::{ks_one_sample, ks_two_sample, mean, std_error, sup_difference};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    /// Sample sizes divided by ten.
    Quick,
    Full,
}

impl Suite {
    fn n(self, full: usize) -> usize {
        match self {
            Suite::Quick => (full / 10).max(100),
            Suite::Full => full,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub statistic: f64,
    pub p: Option<f64>,
    pub pass: bool,
    #[serde(skip)]
    pub detail: String,
}

impl Outcome {
    fn new(statistic: f64, p: Option<f64>, pass: bool, detail: String) -> Self {
        Self { statistic, p, pass, detail }
    }

    fn failed(e: crate::Error) -> Self {
        Self::new(f64::NAN, None, false, format!("error: {e}"))
    }
}

pub type Criterion = fn(Suite, u64) -> Result<Outcome>;

pub const CRITERIA: [(&str, Criterion); 11] = [
    ("laplace_identity", laplace_identity),
    ("half_stable_cdf", half_stable_cdf),
    ("conditioned_stable", conditioned_stable),
    ("tilt_identity", tilt_identity),
    ("truncation_acceptance", truncation_acceptance),
    ("stable_first_passage", stable_first_passage),
    ("oracle_equivalence", oracle_equivalence),
    ("structural_invariants", structural_invariants),
    ("complexity_bound", complexity_bound),
    ("bench_completion", bench_completion),
    ("fpde", fpde_checks),
];

/// Runs one criterion by index with its own stream derived from `seed`.
pub fn run_criterion(i: usize, suite: Suite, seed: u64) -> (&'static str, Outcome) {
    let (name, f) = CRITERIA[i];
    let s = RngStream::new(seed).split(i as u64).key();
    (name, f(suite, s).unwrap_or_else(Outcome::failed))
}

/// All criteria in order; the map is what `validate.json` holds.
pub fn run_suite(suite: Suite, seed: u64) -> BTreeMap<String, Outcome> {
    (0..CRITERIA.len())
        .map(|i| {
            let (name, o) = run_criterion(i, suite, seed);
            (format!("{:02}_{name}", i + 1), o)
        })
        .collect()
}

/// `n` draws split into fixed chunks, chunk k drawing from `split(k)`.
fn par_draws<T: Send>(n: usize, seed: u64, f: impl Fn(&mut RngStream) -> Result<T> + Sync) -> Result<Vec<T>> {
    const CHUNKS: usize = 64;
    let root = RngStream::new(seed);
    let chunks: Vec<Vec<T>> = (0..CHUNKS)
        .into_par_iter()
        .map(|k| {
            let mut rng = root.split(k as u64);
            let len = n / CHUNKS + usize::from(k < n % CHUNKS);
            (0..len).map(|_| f(&mut rng)).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn two_sided_p(z: f64) -> f64 {
    let n = Normal::standard();
    2.0 * (1.0 - n.cdf(z.abs()))
}

/// Lévy CDF for α = 1/2, θ = 1: P(S₁ ≤ x) = erfc(1/(2√x)).
fn half_stable_cdf_at(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        erfc(0.5 / x.sqrt())
    }
}

fn laplace_identity(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(100_000);
    let ctx = ZolotarevContext::new(0.5)?;
    let start = Instant::now();
    let xs = par_draws(n, seed, |rng| Ok(stable_sample(&ctx, 1.0, 1.0, rng)))?;
    let elapsed = start.elapsed();
    let c = laplace_check(&xs, 1.0, 0.5, 1.0, 0.0, 1.0);
    let pass = c.z_score.abs() < 4.0 && elapsed < Duration::from_secs(10);
    let detail = format!("mean e^-S = {:.5} vs e^-1 = {:.5}, z = {:.2}, {:?}", c.estimate, c.reference, c.z_score, elapsed);
    Ok(Outcome::new(c.z_score, Some(two_sided_p(c.z_score)), pass, detail))
}

fn half_stable_cdf(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(10_000);
    let ctx = ZolotarevContext::new(0.5)?;
    let xs = par_draws(n, seed, |rng| Ok(stable_sample(&ctx, 1.0, 1.0, rng)))?;
    let ks = ks_one_sample(&xs, half_stable_cdf_at);
    let detail = format!("KS D = {:.4}, p = {:.3}, n = {n}", ks.statistic, ks.p_value);
    Ok(Outcome::new(ks.statistic, Some(ks.p_value), ks.p_value > 0.01, detail))
}

fn conditioned_stable(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(10_000);
    let s = 0.5;
    let ctx = ZolotarevContext::new(0.5)?;
    let draws = par_draws(n, seed, |rng| {
        let mut t = Tally::default();
        let x = small_stable_sample(&ctx, 1.0, 1.0, s, rng, &mut t)?;
        Ok((x, t))
    })?;
    let mut tally = Tally::default();
    draws.iter().for_each(|(_, t)| tally.merge(t));
    let xs: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let top = half_stable_cdf_at(s);
    let ks = ks_one_sample(&xs, |x| half_stable_cdf_at(x.min(s)) / top);
    let rate = tally.logconcave_accepts as f64 / tally.logconcave_proposals as f64;
    let pass = ks.p_value > 0.01 && rate >= 0.2;
    let detail = format!("KS p = {:.3}, log-concave acceptance = {rate:.3}", ks.p_value);
    Ok(Outcome::new(ks.statistic, Some(ks.p_value), pass, detail))
}

/// Σw f/Σw and its delta-method standard error.
fn ratio_estimate(w: &[f64], f: &[f64]) -> (f64, f64) {
    let sw: f64 = w.iter().sum();
    let r = w.iter().zip(f).map(|(a, b)| a * b).sum::<f64>() / sw;
    let n = w.len() as f64;
    let var = w.iter().zip(f).map(|(a, b)| (a * (b - r)).powi(2)).sum::<f64>() / (n - 1.0);
    (r, (var * n).sqrt() / sw)
}

fn tilt_identity(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(100_000);
    let (q, s) = (2.0, 0.5);
    let ctx = ZolotarevContext::new(0.5)?;
    let plain = par_draws(n, seed, |rng| small_stable_sample(&ctx, 1.0, 1.0, s, rng, &mut Tally::default()))?;
    let tilted = par_draws(n, seed ^ 0x7117, |rng| {
        let mut t = Tally::default();
        let x = small_tempered_stable_sample(&ctx, 1.0, q, 1.0, s, rng, &mut t)?;
        Ok((x, t.tempered_small_proposals))
    })?;
    let w: Vec<f64> = plain.iter().map(|x| (-q * x).exp()).collect();
    let ys: Vec<f64> = tilted.iter().map(|d| d.0).collect();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for k in 1..=2 {
        let f: Vec<f64> = plain.iter().map(|x| x.powi(k)).collect();
        let g: Vec<f64> = ys.iter().map(|x| x.powi(k)).collect();
        let (r, r_se) = ratio_estimate(&w, &f);
        let (m, m_se) = (mean(&g), std_error(&g));
        let z = (r - m) / (r_se * r_se + m_se * m_se).sqrt();
        worst = worst.max(z.abs());
        parts.push(format!("E[x^{k}]: {r:.5} vs {m:.5} (z = {z:.2})"));
    }
    let proposals: u64 = tilted.iter().map(|d| d.1).sum();
    let acc = n as f64 / proposals as f64;
    let floor = (-q * s).exp() * (1.0 - 3.0 / (n as f64).sqrt());
    let pass = worst <= 3.0 && acc >= floor;
    let detail = format!("{}; acceptance {acc:.4} ≥ {floor:.4}", parts.join(", "));
    Ok(Outcome::new(worst, Some(two_sided_p(worst)), pass, detail))
}

fn truncation_acceptance(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(10_000);
    let (alpha, r, rho) = (0.5, 1.0, 0.5);
    let spec = SubordinatorSpec::new(alpha, 1.0, 0.0, r, r, FiniteMeasure::none())?;
    let fpts = TemperedStableFpts::new(alpha, spec.theta, 0.0)?;
    let b = Boundary::constant(r * rho)?;
    let draws = par_draws(n, seed, |rng| {
        let mut t = Tally::default();
        let x = truncated_triplet(r, &b, &fpts, rng, &mut t)?;
        Ok((x.v - x.u, t.truncation_proposals))
    })?;
    let proposals: u64 = draws.iter().map(|d| d.1).sum();
    let acc = n as f64 / proposals as f64;
    let se = (acc * (1.0 - acc) / proposals as f64).sqrt();
    let floor = 1.0 - rho.powf(alpha);
    let all_short = draws.iter().all(|d| d.0 <= r);
    let pass = acc >= floor - 3.0 * se && all_short;
    let detail = format!("acceptance {acc:.4} (SE {se:.4}) vs 1 − ρ^α = {floor:.4}; all V − U ≤ r: {all_short}");
    Ok(Outcome::new(acc, None, pass, detail))
}

/// P(U ≤ u) for the stable subordinator over a constant level c, by the
/// occupation formula P(U ∈ dy) = G(y) ν̄(c − y) dy with G(y) = ∫₀^∞ f_t(y) dt.
/// Self-similarity turns the t-integral into (α y^{α−1}/θ)∫x^{−α}φ(x)dx, and
/// the y-integral is done by substitution on each half of (0, c).
pub struct UndershootOracle {
    alpha: f64,
    level: f64,
    scale: f64,
}

impl UndershootOracle {
    pub fn new(spec: &SubordinatorSpec, level: f64) -> Result<Self> {
        let a = spec.alpha;
        let ctx = ZolotarevContext::new(a)?;
        let moment = integrate(|x| if x > 0.0 { x.powf(-a) * phi_density(&ctx, x).unwrap_or(0.0) } else { 0.0 }, 0.0, f64::INFINITY, 1e-9)?;
        // G(y)ν̄(c−y) = scale · y^{α−1}(c−y)^{−α}, ν̄(x) = ϑx^{−α}/α
        let scale = (a * moment / spec.theta) * (spec.vartheta / a);
        Ok(Self { alpha: a, level, scale })
    }

    pub fn cdf(&self, u: f64) -> Result<f64> {
        let (a, c) = (self.alpha, self.level);
        let u = u.clamp(0.0, c);
        let mid = 0.5 * c;
        // y = s^{1/α} on (0, mid]
        let lower = |y1: f64| {
            integrate_finite(|s: f64| (c - s.powf(1.0 / a)).powf(-a) / a, 0.0, y1.powf(a), 1e-10, 0.0)
        };
        // y = c − w^{1/(1−α)} on [mid, c)
        let upper = |y0: f64, y1: f64| {
            let b = 1.0 - a;
            let w = |y: f64| (c - y).powf(b);
            integrate_finite(|w: f64| (c - w.powf(1.0 / b)).powf(a - 1.0) / b, w(y1), w(y0), 1e-10, 0.0)
        };
        let v = if u <= mid { lower(u)? } else { lower(mid)? + upper(mid, u)? };
        Ok(self.scale * v)
    }
}

fn stable_first_passage(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(10_000);
    let (alpha, level) = (0.6, 1.0);
    let spec = SubordinatorSpec::new(alpha, 1.0, 0.0, f64::INFINITY, f64::INFINITY, FiniteMeasure::none())?;
    let cfg = EngineConfig::default();
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &cfg, &fpts)?;
    let c = Boundary::constant(level)?;
    let ctx = ZolotarevContext::new(alpha)?;
    let xs = par_draws(n, seed, |rng| engine.sample(&c, rng))?;
    let refs = par_draws(n, seed ^ 0x5eed, |rng| {
        Ok((level / stable_sample(&ctx, spec.theta, 1.0, rng)).powf(alpha))
    })?;
    let ts: Vec<f64> = xs.iter().map(|x| x.t).collect();
    let ks = ks_two_sample(&ts, &refs);
    let oracle = UndershootOracle::new(&spec, level)?;
    let total = oracle.cdf(level)?;
    let us: Vec<f64> = xs.iter().map(|x| x.u).collect();
    let sup = sup_difference(&us, |u| oracle.cdf(u).unwrap_or(f64::NAN));
    let pass = ks.p_value > 0.01 && sup <= 0.02;
    let detail = format!("τ KS p = {:.3}; undershoot sup|F_n − F| = {sup:.4}; oracle mass {total:.6}", ks.p_value);
    Ok(Outcome::new(ks.statistic, Some(ks.p_value), pass, detail))
}

/// ϑ = 2, q = 10, c ≡ 5, λ = Exp(1), r auto, ρ = 1/2, r₀ = ∞.
pub fn fig2_spec(alpha: f64) -> Result<SubordinatorSpec> {
    let r = RPolicy::Auto.resolve(alpha, 10.0, f64::INFINITY);
    SubordinatorSpec::new(alpha, 2.0, 10.0, r, f64::INFINITY, FiniteMeasure::exp(1.0)?)
}

fn oracle_equivalence(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(10_000);
    let eps = 1e-4;
    let c0 = 5.0;
    let spec = fig2_spec(0.75)?;
    let cfg = EngineConfig::default();
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &cfg, &fpts)?;
    let oracle = Oracle::new(&spec, OracleConfig::compensated(eps))?;
    let c = Boundary::constant(c0)?;
    let a = par_draws(n, seed, |rng| engine.sample(&c, rng))?;
    let b = par_draws(n, seed ^ 0x0AC1E, |rng| oracle.sample(&c, rng))?;
    let col = |v: &[CrossingTriplet], f: fn(&CrossingTriplet) -> f64| v.iter().map(f).collect::<Vec<f64>>();
    let ks_t = ks_two_sample(&col(&a, |x| x.t), &col(&b, |x| x.t));
    let ks_v = ks_two_sample(&col(&a, |x| x.v), &col(&b, |x| x.v));
    let bias = bias_proxy(&spec, eps, mean(&col(&b, |x| x.t)))?;
    let p = ks_t.p_value.min(ks_v.p_value);
    let pass = p > 0.005 && bias < 0.01 * c0;
    let detail = format!(
        "KS p(τ) = {:.3}, p(V) = {:.3}; bias proxy {bias:.3} vs 0.01·c₀ = {:.3}",
        ks_t.p_value,
        ks_v.p_value,
        0.01 * c0
    );
    Ok(Outcome::new(bias, Some(p), pass, detail))
}

/// Six constant-boundary settings (α, ϑ, q, r₀, λ, c₀).
pub fn structural_grid() -> Result<Vec<(SubordinatorSpec, f64)>> {
    let mk = |a: f64, v: f64, q: f64, r0: f64, l: FiniteMeasure, c0: f64| -> Result<(SubordinatorSpec, f64)> {
        let r = RPolicy::Auto.resolve(a, q, r0);
        Ok((SubordinatorSpec::new(a, v, q, r, r0, l)?, c0))
    };
    Ok(vec![
        mk(0.75, 2.0, 10.0, f64::INFINITY, FiniteMeasure::exp(1.0)?, 5.0)?,
        mk(0.2, 1.0, 1.0, f64::INFINITY, FiniteMeasure::none(), 2.0)?,
        mk(0.5, 1.0, 0.0, 1.0, FiniteMeasure::pareto(1.5, 1.0)?, 3.0)?,
        mk(0.9, 0.5, 5.0, 2.0, FiniteMeasure::point(0.5, 2.0)?, 1.0)?,
        mk(0.35, 3.0, 0.5, f64::INFINITY, FiniteMeasure::exp_with_mass(2.0, 3.0)?, 10.0)?,
        mk(0.65, -1.0 / crate::numerics::gamma(-0.65), 1.0, 1.0, FiniteMeasure::pareto(4.0, 1.0)?, 5.0)?,
    ])
}

fn structural_invariants(suite: Suite, seed: u64) -> Result<Outcome> {
    let total = suite.n(100_000);
    let grid = structural_grid()?;
    let cfg = EngineConfig::default();
    let mut violations = 0usize;
    let mut notes = Vec::new();
    for (k, (spec, c0)) in grid.iter().enumerate() {
        let n = total / grid.len() + usize::from(k < total % grid.len());
        let fpts = default_fpts(spec)?;
        let engine = Engine::new(spec, &cfg, &fpts)?;
        let c = Boundary::constant(*c0)?;
        let allowance = loop_allowance(*c0, spec.r, cfg.rho);
        let xs = par_draws(n, RngStream::new(seed).split(k as u64).key(), |rng| engine.sample(&c, rng))?;
        let bad = xs
            .iter()
            .filter(|x| {
                let level = c.eval(x.t);
                !(x.t > 0.0 && x.u <= level && level < x.v && x.v - x.u > 0.0)
                    || x.diag.loop_count > x.diag.cpp_jump_count + allowance
            })
            .count();
        violations += bad;
        notes.push(format!("α={}: {bad}", spec.alpha));
    }
    let detail = format!("violations per setting [{}]", notes.join(", "));
    Ok(Outcome::new(violations as f64, None, violations == 0, detail))
}

/// Five settings for the E[K] bound: (spec, c₀).
pub fn complexity_grid() -> Result<Vec<(SubordinatorSpec, f64)>> {
    let grid = structural_grid()?;
    Ok(grid.into_iter().filter(|(s, _)| s.lambda_r() > 0.0).take(5).collect())
}

fn complexity_bound(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(10_000);
    let cfg = EngineConfig::default();
    let mut worst = f64::NEG_INFINITY;
    let mut pass = true;
    let mut notes = Vec::new();
    for (k, (spec, c0)) in complexity_grid()?.iter().enumerate() {
        let fpts = default_fpts(spec)?;
        let engine = Engine::new(spec, &cfg, &fpts)?;
        let c = Boundary::constant(*c0)?;
        let sub = RngStream::new(seed).split(k as u64);
        let ks: Vec<f64> = par_draws(n, sub.key(), |rng| Ok(engine.sample(&c, rng)?.diag.cpp_jump_count as f64))?;
        let bound = cpp_jump_bound(spec, *c0, psi0(spec, *c0));
        let (m, se) = (mean(&ks), std_error(&ks));
        let ok_k = m - 3.0 * se <= bound;
        let hit = hitting_bound_check(spec, *c0, (n / 10).max(100), &cfg, &fpts, &mut sub.split(1))?;
        pass &= ok_k && hit.pass;
        worst = worst.max(m / bound);
        notes.push(format!(
            "α={}: E[K] {m:.2}±{se:.2} ≤ {bound:.1}; E[τ] {:.3} ≤ {:.3}; steps {:.2} ≤ {:.2}",
            spec.alpha, hit.mean_tau, hit.tau_bound, hit.mean_steps, hit.steps_bound
        ));
    }
    Ok(Outcome::new(worst, None, pass, notes.join("; ")))
}

fn bench_completion(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(1_000);
    let timeout = Duration::from_secs(120);
    let mut grid = fig2_grid(n);
    grid.extend(fig3_grid(n));
    let rows = bench(&grid, seed, timeout)?;
    let done = rows.iter().filter(|r| r.complete && r.median_s.is_finite()).count();
    let slowest = rows.iter().map(|r| r.median_s).fold(0.0, f64::max);
    let detail = format!("{done}/{} points complete, slowest median {slowest:.3} s per 10⁴ draws", rows.len());
    Ok(Outcome::new(done as f64, None, done == rows.len(), detail))
}

fn fpde_checks(suite: Suite, seed: u64) -> Result<Outcome> {
    let n = suite.n(10_000);
    let cfg = EngineConfig::default();
    let grid = default_grid();
    let rng = RngStream::new(seed);
    let start = Instant::now();
    let zero = fpde_estimate(&FpdeProblem::new(0.0)?, &grid, n, &cfg, &rng)?;
    let exact = zero.iter().all(|r| r.estimate == r.x1 + r.x2 * r.x2 && r.ci_half_width == 0.0);
    let one = FpdeProblem::new(5.0)?.with_phi(std::sync::Arc::new(|_| 1.0));
    let ones = fpde_estimate(&one, &grid, n.min(1_000), &cfg, &rng.split(1))?;
    let flat = ones.iter().all(|r| r.estimate == 1.0 && r.ci_half_width == 0.0);
    let rows = fpde_estimate(&FpdeProblem::new(5.0)?, &grid, n, &cfg, &rng.split(2))?;
    let worst = rows
        .iter()
        .map(|r| (r.estimate - r.rao_blackwell).abs() / (r.std_error.powi(2) + r.rao_blackwell_se.powi(2)).sqrt())
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let pass = exact && flat && worst <= 3.0 && elapsed < Duration::from_secs(600);
    let detail = format!("horizon 0 exact: {exact}; φ ≡ 1 flat: {flat}; max plain/RB z = {worst:.2}; {elapsed:.1?}");
    Ok(Outcome::new(worst, Some(two_sided_p(worst)), pass, detail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undershoot_oracle_is_a_distribution() {
        let spec = SubordinatorSpec::new(0.6, 1.0, 0.0, f64::INFINITY, f64::INFINITY, FiniteMeasure::none()).unwrap();
        let o = UndershootOracle::new(&spec, 2.0).unwrap();
        assert!((o.cdf(2.0).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(o.cdf(0.0).unwrap(), 0.0);
        assert!(o.cdf(0.5).unwrap() < o.cdf(1.5).unwrap());
    }

    #[test]
    fn par_draws_is_deterministic() {
        let a = par_draws(1000, 3, |rng| Ok(rng.uniform())).unwrap();
        let b = par_draws(1000, 3, |rng| Ok(rng.uniform())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1000);
    }

    #[test]
    fn ratio_estimate_with_unit_weights_is_the_mean() {
        let (r, se) = ratio_estimate(&[1.0; 4], &[1.0, 2.0, 3.0, 4.0]);
        assert!((r - 2.5).abs() < 1e-15);
        assert!((se - std_error(&[1.0, 2.0, 3.0, 4.0])).abs() < 1e-15);
    }
}
