use std::time::Duration;

use fptsim::engine::{default_fpts, Engine};
use fptsim::model::{Boundary, CrossingTriplet, EngineConfig, FiniteMeasure, SubordinatorSpec};
use fptsim::validation::oracle::{bias_proxy, Oracle, OracleConfig};
use fptsim::validation::stats::mean;
use fptsim::validation::{bench_point, hitting_bound_check, ks_one_sample, ks_two_sample, write_bench_csv, BenchPoint};
use fptsim::RngStream;

/// A subordinator whose stable part is nearly invisible next to a busy
/// compound Poisson part.
fn jump_dominated() -> SubordinatorSpec {
    SubordinatorSpec::new(0.5, 1e-3, 1.0, f64::INFINITY, f64::INFINITY, FiniteMeasure::exp_with_mass(1.0, 20.0).unwrap())
        .unwrap()
}

/// (τ, U, V) with U clipped at `floor`: the plain oracle drops every jump
/// below ε, so it cannot reproduce undershoots that small.
fn coords(xs: &[CrossingTriplet], floor: f64) -> [Vec<f64>; 3] {
    [xs.iter().map(|x| x.t).collect(), xs.iter().map(|x| x.u.max(floor)).collect(), xs.iter().map(|x| x.v).collect()]
}

#[test]
fn oracle_matches_engine_when_jumps_dominate() {
    let spec = jump_dominated();
    let cfg = EngineConfig::default();
    let fpts = default_fpts(&spec).unwrap();
    let engine = Engine::new(&spec, &cfg, &fpts).unwrap();
    let eps = 1e-6;
    let oracle = Oracle::new(&spec, OracleConfig::plain(eps)).unwrap();
    for c in [Boundary::constant(0.5).unwrap(), Boundary::linear(0.5, 0.2).unwrap()] {
        let mut r1 = RngStream::new(1);
        let mut r2 = RngStream::new(2);
        let n = 2000;
        let a: Vec<_> = (0..n).map(|_| engine.sample(&c, &mut r1).unwrap()).collect();
        let b: Vec<_> = (0..n).map(|_| oracle.sample(&c, &mut r2).unwrap()).collect();
        let bias = bias_proxy(&spec, eps, mean(&coords(&a, 0.0)[0])).unwrap();
        assert!(bias < 1e-3 * c.c0(), "bias proxy {bias}");
        for (k, (x, y)) in coords(&a, 100.0 * eps).iter().zip(coords(&b, 100.0 * eps).iter()).enumerate() {
            let p = ks_two_sample(x, y).p_value;
            assert!(p > 0.01, "coordinate {k}: p = {p}");
        }
    }
}

#[test]
fn ks_p_values_are_calibrated() {
    let mut rng = RngStream::new(21);
    let reps = 400;
    let mut one = 0;
    let mut two = 0;
    for _ in 0..reps {
        let x: Vec<f64> = (0..60).map(|_| rng.uniform()).collect();
        let y: Vec<f64> = (0..80).map(|_| rng.uniform()).collect();
        one += (ks_one_sample(&x, |v| v.clamp(0.0, 1.0)).p_value < 0.05) as usize;
        two += (ks_two_sample(&x, &y).p_value < 0.05) as usize;
    }
    // binomial(400, 0.05) has mean 20 and sd about 4.4
    for hits in [one, two] {
        assert!((5..=38).contains(&hits), "{hits} rejections out of {reps}");
    }
}

#[test]
fn ks_detects_a_shift() {
    let mut rng = RngStream::new(22);
    let x: Vec<f64> = (0..500).map(|_| rng.uniform()).collect();
    let y: Vec<f64> = (0..500).map(|_| rng.uniform() + 0.2).collect();
    assert!(ks_two_sample(&x, &y).p_value < 1e-6);
    assert!(ks_one_sample(&y, |v| v.clamp(0.0, 1.0)).p_value < 1e-6);
}

#[test]
fn hitting_time_respects_its_bound() {
    let spec = jump_dominated();
    let cfg = EngineConfig::default();
    let fpts = default_fpts(&spec).unwrap();
    let report = hitting_bound_check(&spec, 2.0, 2000, &cfg, &fpts, &mut RngStream::new(5)).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.mean_tau < report.tau_bound);
}

#[test]
fn small_bench_point_completes() {
    let p = BenchPoint { alpha: 0.5, q: 1.0, vartheta: 1.0, c0: 1.0, rho: 0.5, n: 200 };
    let row = bench_point(&p, 9, Duration::from_secs(60)).unwrap();
    assert!(row.complete && row.loop_bound_ok);
    assert_eq!(row.n, 200);
    assert!(row.mean_m >= 1.0 && row.mean_k >= 0.0);
    assert!(row.median_s <= row.p90_s && row.mean_s > 0.0);
    let mut buf = Vec::new();
    write_bench_csv(&[row], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("alpha,q,vartheta,c0,r,rho,n,mean_s,median_s,p90_s,mean_M,mean_K"));
}
