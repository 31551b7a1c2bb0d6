//! Compares exact draws with a brute-force ε-truncated simulation of the
//! same process through two-sample Kolmogorov–Smirnov tests.

use fptsim::engine::{default_fpts, Engine};
use fptsim::model::{Boundary, EngineConfig, FiniteMeasure, SubordinatorSpec};
use fptsim::validation::{bias_proxy, ks_two_sample, Oracle, OracleConfig};
use fptsim::RngStream;

fn main() -> fptsim::Result<()> {
    let spec = SubordinatorSpec::new(0.4, 0.5, 1.0, f64::INFINITY, f64::INFINITY, FiniteMeasure::exp_with_mass(1.0, 2.0)?)?;
    let c = Boundary::constant(1.0)?;
    let cfg = EngineConfig::default();
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &cfg, &fpts)?;
    let eps = 1e-6;
    let oracle = Oracle::new(&spec, OracleConfig::compensated(eps))?;

    let n = 3000;
    let (mut r1, mut r2) = (RngStream::new(1), RngStream::new(2));
    let exact: Vec<_> = (0..n).map(|_| engine.sample(&c, &mut r1)).collect::<Result<_, _>>()?;
    let approx: Vec<_> = (0..n).map(|_| oracle.sample(&c, &mut r2)).collect::<Result<_, _>>()?;

    let tau = |xs: &[fptsim::model::CrossingTriplet]| xs.iter().map(|x| x.t).collect::<Vec<_>>();
    let over = |xs: &[fptsim::model::CrossingTriplet]| xs.iter().map(|x| x.v).collect::<Vec<_>>();
    let mean_tau = tau(&exact).iter().sum::<f64>() / n as f64;
    println!("bias proxy at ε = {eps}: {:.2e}", bias_proxy(&spec, eps, mean_tau)?);
    println!("KS p-value for τ: {:.3}", ks_two_sample(&tau(&exact), &tau(&approx)).p_value);
    println!("KS p-value for V: {:.3}", ks_two_sample(&over(&exact), &over(&approx)).p_value);
    Ok(())
}
