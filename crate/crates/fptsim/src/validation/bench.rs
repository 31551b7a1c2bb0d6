//! Wall-clock benchmark over parameter grids.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{default_fpts, Engine};
use crate::error::Result;
use crate::model::{loop_allowance, Boundary, EngineConfig, FiniteMeasure, RPolicy, SubordinatorSpec, Tally};
use crate::rng::RngStream;

use super::stats::{mean, quantile};

/// One grid point: the model is ϑ, α, q with r₀ = ∞, λ = Exp(1) and c ≡ c₀.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchPoint {
    pub alpha: f64,
    pub q: f64,
    pub vartheta: f64,
    pub c0: f64,
    pub rho: f64,
    pub n: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub alpha: f64,
    pub q: f64,
    pub vartheta: f64,
    pub c0: f64,
    pub r: f64,
    pub rho: f64,
    /// draws completed
    pub n: usize,
    /// per-sample wall time statistics, in seconds per 10⁴ samples
    pub mean_s: f64,
    pub median_s: f64,
    pub p90_s: f64,
    pub mean_m: f64,
    pub mean_k: f64,
    #[serde(skip)]
    pub complete: bool,
    #[serde(skip)]
    pub loop_bound_ok: bool,
    #[serde(skip)]
    pub tally: Tally,
    #[serde(skip)]
    pub max_loops: u64,
}

fn point(alpha: f64, q: f64, n: usize) -> BenchPoint {
    BenchPoint { alpha, q, vartheta: 2.0, c0: 5.0, rho: 0.5, n }
}

/// α ∈ {0.05, 0.10, …, 0.95} with ϑ = 2, q = 10, c ≡ 5.
pub fn fig2_grid(n: usize) -> Vec<BenchPoint> {
    (1..=19).map(|i| point(0.05 * i as f64, 10.0, n)).collect()
}

/// (α, q) ∈ {(0.25, 1), (0.95, 100), (0.98, 100)}.
pub fn fig3_grid(n: usize) -> Vec<BenchPoint> {
    vec![point(0.25, 1.0, n), point(0.95, 100.0, n), point(0.98, 100.0, n)]
}

pub fn point_spec(p: &BenchPoint) -> Result<SubordinatorSpec> {
    let r = RPolicy::Auto.resolve(p.alpha, p.q, f64::INFINITY);
    SubordinatorSpec::new(p.alpha, p.vartheta, p.q, r, f64::INFINITY, FiniteMeasure::exp(1.0)?)
}

/// Runs one point until `n` draws or `timeout`, whichever comes first.
pub fn bench_point(p: &BenchPoint, seed: u64, timeout: Duration) -> Result<BenchRow> {
    let spec = point_spec(p)?;
    let cfg = EngineConfig { rho: p.rho, seed, ..EngineConfig::default() };
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &cfg, &fpts)?;
    let c = Boundary::constant(p.c0)?;
    let mut rng = RngStream::new(seed);
    let allowance = loop_allowance(p.c0, spec.r, p.rho);
    let start = Instant::now();
    let mut times = Vec::with_capacity(p.n);
    let (mut ms, mut ks) = (Vec::with_capacity(p.n), Vec::with_capacity(p.n));
    let mut tally = Tally::default();
    let mut loop_bound_ok = true;
    let mut max_loops = 0;
    for _ in 0..p.n {
        if start.elapsed() > timeout {
            break;
        }
        let t0 = Instant::now();
        let x = engine.sample(&c, &mut rng)?;
        times.push(t0.elapsed().as_secs_f64() * 1e4);
        ms.push(x.diag.loop_count as f64);
        ks.push(x.diag.cpp_jump_count as f64);
        tally.merge(&x.diag.tally);
        max_loops = max_loops.max(x.diag.loop_count);
        loop_bound_ok &= x.diag.loop_count <= x.diag.cpp_jump_count + allowance;
    }
    let done = times.len();
    let stat = |f: &dyn Fn(&[f64]) -> f64, v: &[f64]| if v.is_empty() { f64::NAN } else { f(v) };
    Ok(BenchRow {
        alpha: p.alpha,
        q: p.q,
        vartheta: p.vartheta,
        c0: p.c0,
        r: spec.r,
        rho: p.rho,
        n: done,
        mean_s: stat(&mean, &times),
        median_s: stat(&|v| quantile(v, 0.5), &times),
        p90_s: stat(&|v| quantile(v, 0.9), &times),
        mean_m: stat(&mean, &ms),
        mean_k: stat(&mean, &ks),
        complete: done == p.n,
        loop_bound_ok,
        tally,
        max_loops,
    })
}

/// All points in parallel; point i uses stream `split(i)` of `seed`, and
/// rows come back in grid order.
pub fn bench(grid: &[BenchPoint], seed: u64, timeout: Duration) -> Result<Vec<BenchRow>> {
    let root = RngStream::new(seed);
    grid.par_iter()
        .enumerate()
        .map(|(i, p)| bench_point(p, root.split(i as u64).key(), timeout))
        .collect()
}

pub const BENCH_COLUMNS: [&str; 12] =
    ["alpha", "q", "vartheta", "c0", "r", "rho", "n", "mean_s", "median_s", "p90_s", "mean_M", "mean_K"];

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.alpha.to_string(),
            r.q.to_string(),
            r.vartheta.to_string(),
            r.c0.to_string(),
            r.r.to_string(),
            r.rho.to_string(),
            r.n.to_string(),
            r.mean_s.to_string(),
            r.median_s.to_string(),
            r.p90_s.to_string(),
            r.mean_m.to_string(),
            r.mean_k.to_string(),
        ])
        ?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = fig2_grid(10);
        assert_eq!(g.len(), 19);
        assert!((g[0].alpha - 0.05).abs() < 1e-12 && (g[18].alpha - 0.95).abs() < 1e-12);
        assert_eq!(fig3_grid(1).len(), 3);
    }

    #[test]
    fn csv_header_and_rows() {
        let rows = bench(&fig3_grid(20)[..1], 1, Duration::from_secs(60)).unwrap();
        assert!(rows[0].complete && rows[0].loop_bound_ok);
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "alpha,q,vartheta,c0,r,rho,n,mean_s,median_s,p90_s,mean_M,mean_K");
        assert!(lines.next().unwrap().starts_with("0.25,1,2,5,0.5,0.5,20,"));
    }
}
