//! Builds a model from key = value text, the format read by `fptsim --config`.

use fptsim::engine::{default_fpts, Engine};
use fptsim::model::ModelConfig;
use fptsim::RngStream;

const MODEL: &str = "
# tempered stable part
alpha    = 0.5
vartheta = 1
q        = 2
r        = auto
r0       = inf
# compound Poisson part
lambda   = exp(1, 0.5)
boundary = linear(3, 0.5)
rho      = 0.5
seed     = 9
";

fn main() -> fptsim::Result<()> {
    let cfg = ModelConfig::parse(MODEL)?;
    let spec = cfg.spec()?;
    let engine_cfg = cfg.engine_config()?;
    let boundary = cfg.boundary()?;
    println!("{:?}", spec.summary());
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &engine_cfg, &fpts)?;
    let mut rng = RngStream::new(engine_cfg.seed);
    for _ in 0..5 {
        let x = engine.sample(&boundary, &mut rng)?;
        println!("tau {:.4}  U {:.4}  V {:.4}", x.t, x.u, x.v);
    }
    Ok(())
}
