//! The `fptsim` command line: `sample`, `validate`, `bench` and `fpde`.
//!
//! Exit codes are 0 on success, 1 on runtime errors or failed validation,
//! and 2 on configuration errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::engine::{default_fpts, Engine};
use crate::error::{Error, Result};
use crate::fpde::{default_grid, fpde_estimate, write_fpde_csv, FpdeProblem};
use crate::model::{drift_adjust, Boundary, CrossingTriplet, ModelConfig, DEFAULT_SEED};
use crate::rng::RngStream;
use crate::validation::{bench, fig2_grid, fig3_grid, run_suite, write_bench_csv, Suite};

#[derive(Debug, Parser)]
#[command(name = "fptsim", version, about = "Exact first-passage sampling for subordinators")]
pub struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key = value model file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Main output file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw n first-passage triplets
    Sample(SampleArgs),
    /// Run the acceptance suite and write validate.json
    Validate {
        #[arg(long, value_enum, default_value_t = SuiteArg::Full)]
        suite: SuiteArg,
    },
    /// Time the engine over a parameter grid and write bench.csv
    Bench {
        #[arg(long, value_enum, default_value_t = GridArg::Fig2)]
        grid: GridArg,
        /// Draws per grid point
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Per-point wall-clock budget in seconds
        #[arg(long, default_value_t = 600)]
        timeout: u64,
    },
    /// Estimate the FPDE solution on {−1, 0, 1}² and write fpde.csv
    Fpde {
        #[arg(long, default_value_t = 5.0)]
        horizon: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long)]
        rho: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SuiteArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GridArg {
    Fig2,
    Fig3,
}

/// Model flags; each mirrors the config key of the same name.
#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Linear drift μ ≥ 0 added to the subordinator
    #[arg(long)]
    pub drift: Option<f64>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub vartheta: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// A number or `auto`
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub r0: Option<String>,
    /// none, exp(rate), exp(rate,mass), pareto(exponent,cut), point(at,mass)
    #[arg(long)]
    pub lambda: Option<String>,
    /// const(c0) or linear(c0,slope)
    #[arg(long)]
    pub boundary: Option<String>,
    #[arg(long)]
    pub rho: Option<String>,
}

impl SampleArgs {
    fn overrides(&self) -> Result<ModelConfig> {
        let mut cfg = ModelConfig::default();
        let pairs = [
            ("alpha", &self.alpha),
            ("vartheta", &self.vartheta),
            ("q", &self.q),
            ("r", &self.r),
            ("r0", &self.r0),
            ("lambda", &self.lambda),
            ("boundary", &self.boundary),
            ("rho", &self.rho),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        Ok(cfg)
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fptsim: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Param(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            ModelConfig::parse(&text)?
        }
        None => ModelConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Sample(a) => run_sample(cli, &file, a, seed),
        Command::Validate { suite } => run_validate(cli, *suite, seed),
        Command::Bench { grid, n, timeout } => run_bench(cli, *grid, *n, *timeout, seed),
        Command::Fpde { horizon, n, rho } => run_fpde(cli, &file, *horizon, *n, rho.as_deref(), seed),
    })
}

fn out_path(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn sidecar_path(main: &Path) -> PathBuf {
    main.with_extension("json")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// c̃(t) = max(c(t) − μt, 0).
fn drifted_boundary(c: &Boundary, mu: f64) -> Result<Boundary> {
    let c = c.clone();
    Boundary::custom(Arc::new(move |t| (c.eval(t) - mu * t).max(0.0)))
}

pub const SAMPLE_COLUMNS: [&str; 5] = ["tau", "undershoot", "overshoot", "M", "K"];

pub fn write_sample_csv<W: Write>(rows: &[CrossingTriplet], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SAMPLE_COLUMNS)?;
    for x in rows {
        w.write_record([
            x.t.to_string(),
            x.u.to_string(),
            x.v.to_string(),
            x.diag.loop_count.to_string(),
            x.diag.cpp_jump_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn run_sample(cli: &Cli, file: &ModelConfig, a: &SampleArgs, seed: u64) -> Result<i32> {
    let cfg = file.overlay(&a.overrides()?);
    let spec = cfg.spec()?;
    let mut engine_cfg = cfg.engine_config()?;
    engine_cfg.seed = seed;
    let c = cfg.boundary()?;
    if a.n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    let mu = a.drift.unwrap_or(0.0);
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::Config(format!("--drift must be finite and ≥ 0, got {mu}")));
    }
    let target = if mu > 0.0 { drifted_boundary(&c, mu)? } else { c.clone() };
    let fpts = default_fpts(&spec)?;
    let engine = Engine::new(&spec, &engine_cfg, &fpts)?;
    let root = RngStream::new(seed);
    let rows: Vec<CrossingTriplet> = (0..a.n)
        .into_par_iter()
        .map(|i| engine.sample(&target, &mut root.split(i as u64)).map(|x| drift_adjust(&x, mu)))
        .collect::<Result<_>>()?;
    let path = out_path(cli, "sample.csv");
    write_sample_csv(&rows, fs::File::create(&path)?)?;
    let sidecar = json!({
        "command": "sample",
        "n": a.n,
        "seed": seed,
        "drift": mu,
        "boundary": cfg.boundary,
        "lambda": cfg.lambda.clone().unwrap_or_else(|| "none".into()),
        "rho": engine_cfg.rho,
        "r_policy": if matches!(engine_cfg.r_policy, crate::model::RPolicy::Auto) { "auto" } else { "explicit" },
        "spec": spec.summary(),
    });
    write_json(&sidecar_path(&path), &sidecar)?;
    Ok(0)
}

fn run_validate(cli: &Cli, suite: SuiteArg, seed: u64) -> Result<i32> {
    let suite = match suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let results = run_suite(suite, seed);
    for (name, o) in &results {
        eprintln!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    write_json(&out_path(cli, "validate.json"), &results)?;
    Ok(if results.values().all(|o| o.pass) { 0 } else { 1 })
}

fn run_bench(cli: &Cli, grid: GridArg, n: usize, timeout: u64, seed: u64) -> Result<i32> {
    if n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    let (name, points) = match grid {
        GridArg::Fig2 => ("fig2", fig2_grid(n)),
        GridArg::Fig3 => ("fig3", fig3_grid(n)),
    };
    let rows = bench(&points, seed, Duration::from_secs(timeout))?;
    let path = out_path(cli, "bench.csv");
    write_bench_csv(&rows, fs::File::create(&path)?)?;
    let points: Vec<_> = rows
        .iter()
        .map(|r| {
            json!({
                "alpha": r.alpha,
                "q": r.q,
                "complete": r.complete,
                "loop_bound_ok": r.loop_bound_ok,
                "max_M": r.max_loops,
                "tally": r.tally,
            })
        })
        .collect();
    let sidecar = json!({
        "command": "bench",
        "grid": name,
        "n": n,
        "seed": seed,
        "timeout_s": timeout,
        "time_unit": "seconds per 10^4 draws",
        "model": {"vartheta": 2.0, "c0": 5.0, "lambda": "exp(1)", "r": "auto", "r0": "inf", "rho": 0.5},
        "points": points,
    });
    write_json(&sidecar_path(&path), &sidecar)?;
    Ok(0)
}

fn run_fpde(cli: &Cli, file: &ModelConfig, horizon: f64, n: usize, rho: Option<&str>, seed: u64) -> Result<i32> {
    let mut over = ModelConfig::default();
    if let Some(r) = rho {
        over.set("rho", r)?;
    }
    let mut engine_cfg = file.overlay(&over).engine_config()?;
    engine_cfg.seed = seed;
    let problem = FpdeProblem::new(horizon).map_err(|e| Error::Config(e.to_string()))?;
    if n < 100 {
        return Err(Error::Config(format!("--n must be at least 100, got {n}")));
    }
    let rows = fpde_estimate(&problem, &default_grid(), n, &engine_cfg, &RngStream::new(seed))?;
    let path = out_path(cli, "fpde.csv");
    write_fpde_csv(&rows, fs::File::create(&path)?)?;
    let sidecar = json!({
        "command": "fpde",
        "horizon": horizon,
        "n": n,
        "seed": seed,
        "rho": engine_cfg.rho,
        "phi": "x1 + x2^2",
        "g": "0",
        "ou": {"mu": "identity", "sigma": [[2.0, 1.0], [1.0, 1.0]]},
        "spec": problem.spec.summary(),
        "rows": rows,
    });
    write_json(&sidecar_path(&path), &sidecar)?;
    Ok(0)
}
