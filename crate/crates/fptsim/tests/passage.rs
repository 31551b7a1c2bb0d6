use std::sync::Arc;

use fptsim::model::{Boundary, Tally};
use fptsim::numerics::integrate;
use fptsim::passage::{
    fpts_default, stable_crossing_time, stable_triplet, stable_undershoot, stable_undershoot_beta, truncated_triplet,
    FptsSampler, TemperedStableFpts,
};
use fptsim::stable::{phi_density, ZolotarevContext};
use fptsim::validation::{ks_one_sample, ks_two_sample};
use fptsim::{Error, RngStream};
use statrs::distribution::{Beta, ContinuousCDF};

fn column(xs: &[(f64, f64, f64)], k: usize) -> Vec<f64> {
    xs.iter().map(|x| [x.0, x.1, x.2][k]).collect()
}

#[test]
fn constant_and_general_paths_agree() {
    let ctx = ZolotarevContext::new(0.4).unwrap();
    let level = 1.5;
    let fast = Boundary::constant(level).unwrap();
    let slow = Boundary::custom(Arc::new(move |_| level)).unwrap();
    let mut tally = Tally::default();
    let mut r1 = RngStream::new(1);
    let mut r2 = RngStream::new(2);
    let a: Vec<_> = (0..4000)
        .map(|_| stable_triplet(&ctx, 0.8, &fast, &mut r1, &mut tally).map(|x| (x.t, x.u, x.v)).unwrap())
        .collect();
    let b: Vec<_> = (0..4000)
        .map(|_| stable_triplet(&ctx, 0.8, &slow, &mut r2, &mut tally).map(|x| (x.t, x.u, x.v)).unwrap())
        .collect();
    for k in 0..3 {
        let p = ks_two_sample(&column(&a, k), &column(&b, k)).p_value;
        assert!(p > 0.01, "coordinate {k}: p = {p}");
    }
    let beta = Beta::new(0.4, 0.6).unwrap();
    assert!(ks_one_sample(&column(&a, 1), |u| beta.cdf(u / level)).p_value > 0.01);
}

#[test]
fn two_undershoot_samplers_share_a_law() {
    let ctx = ZolotarevContext::new(0.6).unwrap();
    let (theta, level) = (1.0, 1.0);
    let mut tally = Tally::default();
    let mut r1 = RngStream::new(3);
    let mut r2 = RngStream::new(4);
    // standardized levels η from about 0.16 to about 680
    for tau in [3.0, 0.7, 0.02] {
        let a: Vec<f64> =
            (0..3000).map(|_| stable_undershoot(&ctx, theta, tau, level, &mut r1, &mut tally).unwrap()).collect();
        let b: Vec<f64> =
            (0..3000).map(|_| stable_undershoot_beta(&ctx, theta, tau, level, &mut r2, &mut tally).unwrap()).collect();
        let p = ks_two_sample(&a, &b).p_value;
        assert!(p > 0.01, "tau = {tau}: p = {p}");
        assert!(a.iter().chain(&b).all(|&u| u > 0.0 && u < level));
    }
}

#[test]
fn tempered_crossing_time_law() {
    // P(τ ≤ t) = 1 − e^{θtq^α} ∫₀^c e^{−qx} f_t(x) dx with f_t the stable density at time t
    let (a, theta, q, c) = (0.6, 1.2, 2.0, 0.8);
    let ctx = ZolotarevContext::new(a).unwrap();
    let g = Boundary::constant(c).unwrap();
    let mut rng = RngStream::new(5);
    let mut tally = Tally::default();
    let taus: Vec<f64> = (0..2000).map(|_| fpts_default(&ctx, theta, q, &g, &mut rng, &mut tally).unwrap().t).collect();
    let cdf = |t: f64| {
        let scale = (theta * t).powf(-1.0 / a);
        let below = integrate(|x| (-q * x).exp() * scale * phi_density(&ctx, x * scale).unwrap(), 0.0, c, 1e-9).unwrap();
        1.0 - (theta * t * q.powf(a)).exp() * below
    };
    let ks = ks_one_sample(&taus, cdf);
    assert!(ks.p_value > 0.01, "p = {}", ks.p_value);
    assert!(tally.window_proposals >= tally.fpts_calls);
}

#[test]
fn tempered_triplets_are_well_formed() {
    let fpts = TemperedStableFpts::new(0.7, 1.5, 4.0).unwrap();
    let mut rng = RngStream::new(6);
    let mut tally = Tally::default();
    for b in [Boundary::constant(0.3).unwrap(), Boundary::linear(0.3, 0.5).unwrap()] {
        for _ in 0..2000 {
            let x = fpts.sample(&b, &mut rng, &mut tally).unwrap();
            let level = b.eval(x.t);
            assert!(x.t > 0.0);
            if x.diag.crept {
                assert_eq!(x.u, x.v);
                assert_eq!(x.v, level);
            } else {
                assert!(x.u <= level && level < x.v && x.v > x.u, "{x:?} at {level}");
            }
        }
    }
}

#[test]
fn truncation_keeps_short_jumps_only() {
    let fpts = TemperedStableFpts::new(0.5, 1.0, 0.0).unwrap();
    let b = Boundary::constant(0.25).unwrap();
    let mut rng = RngStream::new(7);
    let mut tally = Tally::default();
    for _ in 0..2000 {
        let x = truncated_triplet(0.5, &b, &fpts, &mut rng, &mut tally).unwrap();
        assert!(x.v - x.u <= 0.5);
    }
    assert!(tally.truncation_rejections > 0);
}

#[test]
fn infinite_truncation_takes_one_call() {
    let fpts = TemperedStableFpts::new(0.5, 1.0, 1.0).unwrap();
    let b = Boundary::constant(3.0).unwrap();
    let mut rng = RngStream::new(8);
    let mut tally = Tally::default();
    for _ in 0..100 {
        truncated_triplet(f64::INFINITY, &b, &fpts, &mut rng, &mut tally).unwrap();
    }
    assert_eq!((tally.truncation_proposals, tally.truncation_rejections), (100, 0));
}

#[test]
fn boundary_above_truncation_is_rejected() {
    let fpts = TemperedStableFpts::new(0.5, 1.0, 1.0).unwrap();
    let b = Boundary::constant(3.0).unwrap();
    let err = truncated_triplet(1.0, &b, &fpts, &mut RngStream::new(1), &mut Tally::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn closed_form_and_bisection_crossing_times_agree() {
    let ctx = ZolotarevContext::new(0.35).unwrap();
    let a = Boundary::constant(0.9).unwrap();
    let b = Boundary::custom(Arc::new(|_| 0.9)).unwrap();
    for seed in 0..200 {
        let (t1, _) = stable_crossing_time(&ctx, 2.0, &a, &mut RngStream::new(seed)).unwrap();
        let (t2, _) = stable_crossing_time(&ctx, 2.0, &b, &mut RngStream::new(seed)).unwrap();
        assert!((t1 / t2 - 1.0).abs() < 1e-10);
    }
}
