//! The undershoot of a stable subordinator given its crossing time.
//!
//! In the standardized variable x = u(θτ)^{−1/α} the undershoot has density
//! ∝ φ_α(x)(η − x)^{−α} on (0, η), with η = level·(θτ)^{−1/α}.

use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::model::Tally;
use crate::rng::RngStream;
use crate::stable::{PhiGrid, ZolotarevContext};

const MAX_INTERVALS: usize = 400;
const SLACK: f64 = 0.2;

/// M_α = (1−α)^{1−1/α} α^{−1−1/α} e^{−1/α}, the maximum of
/// h(x, u) = σ_α(u) x^{−β−1} e^{−σ_α(u) x^{−β}}.
pub fn m_alpha(alpha: f64) -> f64 {
    ((1.0 - 1.0 / alpha) * (1.0 - alpha).ln() - (1.0 + 1.0 / alpha) * alpha.ln() - 1.0 / alpha).exp()
}

/// ln h(x, u) from ln x.
pub fn ln_h(ctx: &ZolotarevContext, lx: f64, u: f64) -> f64 {
    let ln_sigma = ctx.ln_sigma_at_zero + ctx.ln_sigma_excess(u);
    let ln_sy = ln_sigma - ctx.beta * lx;
    ln_sigma - (ctx.beta + 1.0) * lx - ln_sy.exp()
}

fn eta_of(ctx: &ZolotarevContext, theta: f64, tau: f64, level: f64) -> Result<f64> {
    if !(tau > 0.0 && level > 0.0 && theta > 0.0) {
        return Err(Error::Param(format!("undershoot needs tau, level, theta > 0, got ({tau}, {level}, {theta})")));
    }
    Ok((level.ln() - (theta * tau).ln() / ctx.alpha).exp())
}

struct Cell {
    a: f64,
    c: f64,
    /// φ at the ends, rescaled by the common factor.
    fa: f64,
    fc: f64,
    peak: f64,
    mass: f64,
    lower: f64,
    last: bool,
}

/// Draws from ∝ φ_α(x)(η−x)^{−α} on (0, η) and returns (x/η, 1 − x/η), the
/// second coordinate computed directly so that it keeps relative precision.
pub(crate) fn undershoot_fraction(ctx: &ZolotarevContext, eta: f64, rng: &mut RngStream, tally: &mut Tally) -> Result<(f64, f64)> {
    match ctx.phi_grid() {
        Some(g) if eta > g.x[1] && eta < g.x[g.x.len() - 1] => tabulated_fraction(ctx, g, eta, rng, tally),
        _ => adaptive_fraction(ctx, eta, rng, tally),
    }
}

/// Rejection from an envelope read off the tabulated φ_α. Cells ending below
/// η/2 share the bound (η/2)^{−α} and are picked through prefix sums; cells
/// in (η/2, η) carry their own bound; the last cell ends at η and is drawn by
/// inversion of (η − x)^{−α}.
fn tabulated_fraction(
    ctx: &ZolotarevContext,
    g: &PhiGrid,
    eta: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<(f64, f64)> {
    let a = ctx.alpha;
    let x = &g.x;
    let j = x.partition_point(|&v| v < eta) - 1;
    // keep the last cell at least as wide as its neighbour so that the
    // bound on (η − x)^{−α} over that neighbour stays within 2^α
    let k = if j >= 1 && eta - x[j] < x[j] - x[j - 1] { j - 1 } else { j };
    let rel_eta = crate::stable::ln_phi(ctx, eta)? - g.ln_peak;
    let last_peak = g.rel[k..=j].iter().fold(rel_eta, |m, &v| m.max(v)).exp();
    let last_mass = last_peak * (eta - x[k]).powf(1.0 - a) / (1.0 - a);
    let half = 0.5 * eta;
    let m = (x.partition_point(|&v| v <= half) - 1).min(k);
    let block_factor = half.powf(-a);
    let block_mass = g.cum[m] * block_factor;
    let middle: Vec<f64> = (m..k).map(|i| g.cell_peak(i) * (x[i + 1] - x[i]) * (eta - x[i + 1]).powf(-a)).collect();
    let middle_mass: f64 = middle.iter().sum();
    let total = block_mass + middle_mass + last_mass;
    loop {
        tally.undershoot_proposals += 1;
        let mut pick = rng.uniform() * total;
        let (xv, rest, env) = if pick < block_mass {
            let s = rng.uniform() * g.cum[m];
            let i = (g.cum.partition_point(|&c| c <= s) - 1).min(m - 1);
            let xv = x[i] + rng.uniform() * (x[i + 1] - x[i]);
            (xv, eta - xv, g.cell_peak(i) * block_factor)
        } else if pick < block_mass + middle_mass {
            pick -= block_mass;
            let mut i = k - 1;
            for (c, &w) in middle.iter().enumerate() {
                if pick < w {
                    i = m + c;
                    break;
                }
                pick -= w;
            }
            let off = rng.uniform() * (x[i + 1] - x[i]);
            (x[i] + off, (eta - x[i]) - off, g.cell_peak(i) * (eta - x[i + 1]).powf(-a))
        } else {
            let rest = (eta - x[k]) * rng.uniform().powf(1.0 / (1.0 - a));
            (eta - rest, rest, last_peak * rest.powf(-a))
        };
        if !(xv > 0.0 && rest > 0.0) {
            continue;
        }
        let target = (crate::stable::ln_phi(ctx, xv)? - g.ln_peak).exp() * rest.powf(-a);
        if target > env * (1.0 + 1e-6) {
            return Err(Error::Envelope(xv));
        }
        if rng.uniform() * env <= target {
            return Ok((xv / eta, rest / eta));
        }
    }
}

/// The same law by rejection from an envelope refined on a grid built for
/// this η alone; φ_α is unimodal, so on each cell its maximum is at an end
/// or at the mode.
fn adaptive_fraction(ctx: &ZolotarevContext, eta: f64, rng: &mut RngStream, tally: &mut Tally) -> Result<(f64, f64)> {
    let a = ctx.alpha;
    let mode = ctx.mode();
    let ln_phi = |x: f64| crate::stable::ln_phi(ctx, x);
    let mut pts: Vec<f64> = Vec::with_capacity(32);
    pts.push(0.0);
    for k in 1..=8 {
        pts.push(eta * 0.5f64.powi(k));
    }
    for k in 2..=6 {
        pts.push(eta * (1.0 - 0.5f64.powi(k)));
    }
    if mode < eta {
        pts.push(mode);
    }
    pts.push(eta);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut lv = Vec::with_capacity(pts.len());
    for &x in &pts {
        lv.push(if x <= 0.0 { f64::NEG_INFINITY } else { ln_phi(x)? });
    }
    let ln_mode = if mode < eta { ln_phi(mode)? } else { f64::NEG_INFINITY };
    let scale = lv.iter().cloned().chain(std::iter::once(ln_mode)).fold(f64::NEG_INFINITY, f64::max);
    if !scale.is_finite() {
        return Err(Error::Numeric(format!("φ underflows on (0, {eta})")));
    }
    let pm = (ln_mode - scale).exp();
    let make = |x0: f64, f0: f64, x1: f64, f1: f64| -> Cell {
        let last = x1 >= eta;
        let peak = if x0 < mode && mode < x1 { pm.max(f0).max(f1) } else { f0.max(f1) };
        let low = f0.min(f1);
        let (mass, lower) = if last {
            let m = (eta - x0).powf(1.0 - a) / (1.0 - a);
            (peak * m, low * m)
        } else {
            let w = x1 - x0;
            (peak * (eta - x1).powf(-a) * w, low * (eta - x0).powf(-a) * w)
        };
        Cell { a: x0, c: x1, fa: f0, fc: f1, peak, mass, lower, last }
    };
    let mut cells: Vec<Cell> = (0..pts.len() - 1)
        .map(|i| make(pts[i], (lv[i] - scale).exp(), pts[i + 1], (lv[i + 1] - scale).exp()))
        .collect();
    loop {
        let total: f64 = cells.iter().map(|c| c.mass).sum();
        let (idx, gap) = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.mass - c.lower))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let slack: f64 = cells.iter().map(|c| c.mass - c.lower).sum();
        if slack <= SLACK * total || cells.len() >= MAX_INTERVALS || gap <= 0.0 {
            break;
        }
        let cell = cells.remove(idx);
        let mid = 0.5 * (cell.a + cell.c);
        if !(mid > cell.a && mid < cell.c) {
            cells.insert(idx, cell);
            break;
        }
        let fm = (ln_phi(mid)? - scale).exp();
        cells.insert(idx, make(mid, fm, cell.c, cell.fc));
        cells.insert(idx, make(cell.a, cell.fa, mid, fm));
    }
    let total: f64 = cells.iter().map(|c| c.mass).sum();
    loop {
        tally.undershoot_proposals += 1;
        let mut pick = rng.uniform() * total;
        let mut cell = &cells[cells.len() - 1];
        for c in &cells {
            if pick < c.mass {
                cell = c;
                break;
            }
            pick -= c.mass;
        }
        let (x, rest, env) = if cell.last {
            let rest = (eta - cell.a) * rng.uniform().powf(1.0 / (1.0 - a));
            (eta - rest, rest, cell.peak * rest.powf(-a))
        } else {
            let off = rng.uniform() * (cell.c - cell.a);
            let x = cell.a + off;
            ((x), (eta - cell.a) - off, cell.peak * (eta - cell.c).powf(-a))
        };
        if !(x > 0.0 && rest > 0.0) {
            continue;
        }
        let target = (ln_phi(x)? - scale).exp() * rest.powf(-a);
        if target > env * (1.0 + 1e-6) {
            return Err(Error::Envelope(x));
        }
        if rng.uniform() * env <= target {
            return Ok((x / eta, rest / eta));
        }
    }
}

/// Exact (up to quadrature tolerance in φ_α) draw of the undershoot given
/// crossing time `tau` at boundary value `level`, for the stable law with
/// E e^{−uζ_t} = e^{−θtu^α}.
pub fn stable_undershoot(
    ctx: &ZolotarevContext,
    theta: f64,
    tau: f64,
    level: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<f64> {
    let eta = eta_of(ctx, theta, tau, level)?;
    let (b, _) = undershoot_fraction(ctx, eta, rng, tally)?;
    Ok(level * b)
}

/// The same law by the literal scheme: B ∼ Beta(1, 1−α) proposals, accepted
/// with probability h(x, U′)/M_α. Its cost per draw is heavy-tailed.
pub fn stable_undershoot_beta(
    ctx: &ZolotarevContext,
    theta: f64,
    tau: f64,
    level: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<f64> {
    let eta = eta_of(ctx, theta, tau, level)?;
    let ln_m = m_alpha(ctx.alpha).ln();
    let ln_eta = eta.ln();
    loop {
        tally.undershoot_proposals += 1;
        // 1 − B = (1 − U)^{1/(1−α)}
        let rest = rng.uniform().powf(1.0 / (1.0 - ctx.alpha));
        let b = 1.0 - rest;
        if !(b > 0.0) {
            continue;
        }
        let lx = ln_eta + b.ln();
        if ln_h(ctx, lx, rng.uniform()) - ln_m >= rng.uniform().ln() {
            return Ok(level * b);
        }
    }
}

/// u + (level − u)·W^{−1/α}: the crossing jump given the undershoot.
pub fn stable_overshoot(ctx: &ZolotarevContext, u: f64, level: f64, rng: &mut RngStream) -> f64 {
    overshoot_from_gap(ctx.alpha, u, level - u, level, rng)
}

pub(crate) fn overshoot_from_gap(alpha: f64, u: f64, gap: f64, level: f64, rng: &mut RngStream) -> f64 {
    let v = u + gap * rng.uniform().powf(-1.0 / alpha);
    if v > level {
        v
    } else {
        level.next_up()
    }
}

/// Joint (τ, U, V) for the constant level ℓ. With B ∼ Beta(α, 1−α) and X
/// independent with density ∝ x^{−α}φ_α(x): U = ℓB, τ = (U/X)^α/θ.
pub(crate) fn constant_level_triplet(
    ctx: &ZolotarevContext,
    theta: f64,
    level: f64,
    rng: &mut RngStream,
    tally: &mut Tally,
) -> Result<(f64, f64, f64)> {
    let a = ctx.alpha;
    let g1 = Gamma::new(a, 1.0).map_err(|e| Error::Param(e.to_string()))?;
    let g2 = Gamma::new(1.0 - a, 1.0).map_err(|e| Error::Param(e.to_string()))?;
    let gx = Gamma::new(2.0 - a, 1.0).map_err(|e| Error::Param(e.to_string()))?;
    let (x1, x2) = loop {
        let x1: f64 = g1.sample(rng);
        let x2: f64 = g2.sample(rng);
        if x1 > 0.0 && x2 > 0.0 {
            break (x1, x2);
        }
    };
    let s = x1 + x2;
    let (b, rest) = (x1 / s, x2 / s);
    // X = (σ_α(W)/G)^{1/β}, W ∝ σ_α^{−(1−α)} by rejection from uniform
    let d = loop {
        tally.undershoot_proposals += 1;
        let w = rng.uniform();
        let d = ctx.ln_sigma_excess(w);
        if rng.exp1() >= (1.0 - a) * d {
            break d;
        }
    };
    let g: f64 = gx.sample(rng);
    let ln_x = (ctx.ln_sigma_at_zero + d - g.ln()) / ctx.beta;
    let tau = (a * (level.ln() + x1.ln() - s.ln() - ln_x) - theta.ln()).exp();
    let u = level * b;
    let v = overshoot_from_gap(a, u, level * rest, level, rng);
    Ok((tau, u.min(level), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_alpha_at_half() {
        assert!((m_alpha(0.5) - 16.0 * (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn h_is_bounded_by_m_alpha() {
        for &a in &[0.2, 0.5, 0.8] {
            let c = ZolotarevContext::new(a).unwrap();
            let m = m_alpha(a).ln();
            let mut best = f64::NEG_INFINITY;
            for i in 0..100 {
                let lx = -10.0 + 20.0 * i as f64 / 99.0;
                for j in 0..100 {
                    let u = (j as f64 + 0.5) / 100.0;
                    best = best.max(ln_h(&c, lx, u));
                }
            }
            assert!(best <= m + 1e-12, "alpha={a}: {best} > {m}");
            assert!(best > m - 0.05);
        }
    }

    #[test]
    fn overshoot_pareto_tail() {
        let c = ZolotarevContext::new(0.5).unwrap();
        let mut rng = RngStream::new(4);
        let n = 100_000;
        let hits = (0..n).filter(|_| stable_overshoot(&c, 0.3, 1.0, &mut rng) - 0.3 > 2.0 * 0.7).count();
        let p = 2f64.powf(-0.5);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 3.0 * se);
        assert!((stable_overshoot(&c, 1.0 - 1e-15, 1.0, &mut rng) - 1.0).abs() < 1e-9);
    }
}
