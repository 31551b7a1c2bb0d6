//! Plain-text `key = value` model files.
//!
//! ```text
//! # benchmark model
//! alpha    = 0.75
//! vartheta = 2
//! q        = 10
//! r        = auto
//! r0       = inf
//! lambda   = exp(1)
//! boundary = const(5)
//! rho      = 0.5
//! seed     = 42
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::boundary::Boundary;
use crate::model::measure::FiniteMeasure;
use crate::model::spec::{EngineConfig, RPolicy, SubordinatorSpec, DEFAULT_SEED};

pub const KEYS: [&str; 10] = ["alpha", "vartheta", "q", "r", "r_policy", "r0", "lambda", "boundary", "rho", "seed"];

/// Raw values; `None` means "not given".
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ModelConfig {
    pub alpha: Option<f64>,
    pub vartheta: Option<f64>,
    pub q: Option<f64>,
    /// A number, or `auto`.
    pub r: Option<String>,
    pub r0: Option<f64>,
    pub lambda: Option<String>,
    pub boundary: Option<String>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    match v.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        s => s
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as a number"))),
    }
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ModelConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "alpha" => self.alpha = Some(parse_f64(key, v)?),
            "vartheta" => self.vartheta = Some(parse_f64(key, v)?),
            "q" => self.q = Some(parse_f64(key, v)?),
            "r" => self.r = Some(v.to_string()),
            "r_policy" => {
                if v != "auto" {
                    return Err(Error::Config(format!("r_policy must be 'auto', got '{v}'")));
                }
                self.r = Some("auto".into())
            }
            "r0" => self.r0 = Some(parse_f64(key, v)?),
            "lambda" => self.lambda = Some(v.to_string()),
            "boundary" => self.boundary = Some(v.to_string()),
            "rho" => self.rho = Some(parse_f64(key, v)?),
            "seed" => {
                self.seed = Some(
                    v.parse::<u64>()
                        .map_err(|_| Error::Config(format!("seed: cannot parse '{v}' as an unsigned integer")))?,
                )
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// `other`'s values win where present.
    pub fn overlay(&self, other: &ModelConfig) -> ModelConfig {
        ModelConfig {
            alpha: other.alpha.or(self.alpha),
            vartheta: other.vartheta.or(self.vartheta),
            q: other.q.or(self.q),
            r: other.r.clone().or_else(|| self.r.clone()),
            r0: other.r0.or(self.r0),
            lambda: other.lambda.clone().or_else(|| self.lambda.clone()),
            boundary: other.boundary.clone().or_else(|| self.boundary.clone()),
            rho: other.rho.or(self.rho),
            seed: other.seed.or(self.seed),
        }
    }

    pub fn r_policy(&self) -> Result<RPolicy> {
        match self.r.as_deref() {
            None | Some("auto") => Ok(RPolicy::Auto),
            Some(v) => Ok(RPolicy::Explicit(parse_f64("r", v)?)),
        }
    }

    pub fn engine_config(&self) -> Result<EngineConfig> {
        let cfg = EngineConfig {
            rho: self.rho.unwrap_or(0.5),
            precision_bits: 53,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            r_policy: self.r_policy()?,
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Builds the model; `alpha` and `vartheta` are required, the rest have
    /// defaults (q = 0, r0 = ∞, r auto, lambda none).
    pub fn spec(&self) -> Result<SubordinatorSpec> {
        let alpha = self.alpha.ok_or_else(|| Error::Config("missing key 'alpha'".into()))?;
        let vartheta = self.vartheta.ok_or_else(|| Error::Config("missing key 'vartheta'".into()))?;
        let q = self.q.unwrap_or(0.0);
        let r0 = self.r0.unwrap_or(f64::INFINITY);
        let r = self.r_policy()?.resolve(alpha, q, r0);
        let base = parse_lambda(self.lambda.as_deref().unwrap_or("none"))?;
        SubordinatorSpec::new(alpha, vartheta, q, r, r0, base).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn boundary(&self) -> Result<Boundary> {
        parse_boundary(self.boundary.as_deref().ok_or_else(|| Error::Config("missing key 'boundary'".into()))?)
    }
}

fn call_args<'a>(s: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let s = s.trim();
    let inner = s.strip_prefix(name)?.trim().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

fn nums(key: &str, args: &[&str], n: usize) -> Result<Vec<f64>> {
    if args.len() != n {
        return Err(Error::Config(format!("{key}: expected {n} argument(s), got {}", args.len())));
    }
    args.iter().map(|a| parse_f64(key, a)).collect()
}

/// `none`, `exp(rate)`, `exp(rate,mass)`, `pareto(exponent,cut)`, `point(at,mass)`.
pub fn parse_lambda(s: &str) -> Result<FiniteMeasure> {
    let s = s.trim();
    let wrap = |e: Error| Error::Config(format!("lambda: {e}"));
    if s == "none" {
        return Ok(FiniteMeasure::none());
    }
    if let Some(a) = call_args(s, "exp") {
        return match a.len() {
            1 => FiniteMeasure::exp(nums("lambda", &a, 1)?[0]).map_err(wrap),
            _ => {
                let v = nums("lambda", &a, 2)?;
                FiniteMeasure::exp_with_mass(v[0], v[1]).map_err(wrap)
            }
        };
    }
    if let Some(a) = call_args(s, "pareto") {
        let v = nums("lambda", &a, 2)?;
        return FiniteMeasure::pareto(v[0], v[1]).map_err(wrap);
    }
    if let Some(a) = call_args(s, "point") {
        let v = nums("lambda", &a, 2)?;
        return FiniteMeasure::point(v[0], v[1]).map_err(wrap);
    }
    Err(Error::Config(format!("lambda: unknown preset '{s}'")))
}

/// `const(c0)` or `linear(c0,slope)`, the latter meaning max(c0 − slope·t, 0).
pub fn parse_boundary(s: &str) -> Result<Boundary> {
    let wrap = |e: Error| Error::Config(format!("boundary: {e}"));
    if let Some(a) = call_args(s, "const") {
        return Boundary::constant(nums("boundary", &a, 1)?[0]).map_err(wrap);
    }
    if let Some(a) = call_args(s, "linear") {
        let v = nums("boundary", &a, 2)?;
        return Boundary::linear(v[0], v[1]).map_err(wrap);
    }
    Err(Error::Config(format!("boundary: unknown preset '{s}'")))
}
