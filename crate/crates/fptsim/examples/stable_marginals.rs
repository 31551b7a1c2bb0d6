//! Marginals of a positive α-stable subordinator: exact draws of ζ_t, the
//! density φ_α by quadrature, and a Laplace transform check.

use fptsim::numerics::integrate;
use fptsim::stable::{phi_density, stable_sample, ZolotarevContext};
use fptsim::RngStream;

fn main() -> fptsim::Result<()> {
    let (alpha, theta, t) = (0.6, 1.0, 1.0);
    let ctx = ZolotarevContext::new(alpha)?;
    let mut rng = RngStream::new(3);
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|_| stable_sample(&ctx, theta, t, &mut rng)).collect();

    let u = 0.8;
    let mc = xs.iter().map(|x| (-u * x).exp()).sum::<f64>() / n as f64;
    println!("E exp(-u ζ_t): {mc:.5} vs exp(-θ t u^α) = {:.5}", (-theta * t * u.powf(alpha)).exp());

    println!("mode of φ_α at {:.4}", ctx.mode());
    for x in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let below = xs.iter().filter(|&&v| v <= x).count() as f64 / n as f64;
        let cdf = integrate(|y| phi_density(&ctx, y).unwrap_or(0.0), 0.0, x, 1e-9)?;
        println!("P(ζ ≤ {x:>4}): empirical {below:.4}, quadrature {cdf:.4}, φ = {:.5}", phi_density(&ctx, x)?);
    }
    Ok(())
}
