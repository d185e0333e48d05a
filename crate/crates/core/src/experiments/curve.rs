use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::dt::{dt_sir, signed_support_match, SignedSupport};
use crate::rng::derive_seed;
use crate::sdp::{default_lambda, sdp_sign_recover, sdp_solve, SdpBackend, SdpConfig};
use crate::sim::{generate_beta, sample_sim, BetaScheme, ModelSpec};
use crate::sir::{compute_sir, SirMode};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SparsityRule {
    /// `s = round(√p)`
    SqrtP,
    /// `s = round(ln p)`
    LogP,
    Explicit(usize),
}

impl SparsityRule {
    pub fn resolve(self, p: usize) -> Result<usize> {
        let s = match self {
            SparsityRule::SqrtP => (p as f64).sqrt().round() as usize,
            SparsityRule::LogP => (p as f64).ln().round() as usize,
            SparsityRule::Explicit(s) => s,
        };
        if s == 0 || s >= p {
            return Err(Error::invalid(format!("sparsity rule {self:?} gives s = {s} for p = {p}; need 1 <= s < p")));
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    DtSir,
    Sdp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::DtSir => "dt-sir",
            Method::Sdp => "sdp",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "dt-sir" | "dtsir" | "dt" => Ok(Method::DtSir),
            "sdp" => Ok(Method::Sdp),
            other => Err(Error::invalid(format!("unknown method '{other}' (expected dt-sir or sdp)"))),
        }
    }
}

/// Solver settings for the SDP method. `lambda: None` uses [`default_lambda`].
#[derive(Clone, Debug, PartialEq)]
pub struct SdpSettings {
    pub lambda: Option<f64>,
    pub backend: SdpBackend,
    pub tol: f64,
    pub max_iter: usize,
    pub step: Option<f64>,
}

impl Default for SdpSettings {
    fn default() -> Self {
        let d = SdpConfig::default();
        Self { lambda: None, backend: d.backend, tol: d.tol, max_iter: d.max_iter, step: d.step }
    }
}

impl SdpSettings {
    pub fn config(&self, lambda: f64) -> SdpConfig {
        SdpConfig { lambda, max_iter: self.max_iter, tol: self.tol, step: self.step, backend: self.backend }
    }
}

#[derive(Clone, Debug)]
pub struct CurveConfig {
    pub model: ModelSpec,
    pub p: usize,
    pub sparsity: SparsityRule,
    pub beta_scheme: BetaScheme,
    pub method: Method,
    pub h: usize,
    pub gamma_grid: Vec<f64>,
    pub reps: usize,
    pub master_seed: u64,
    pub mode: SirMode,
    pub sdp: SdpSettings,
}

impl CurveConfig {
    /// Defaults: `s = √p`, fixed `β`, DT-SIR, `H = 10`, 500 replicates, raw matrix.
    pub fn new(model: ModelSpec, p: usize, gamma_grid: Vec<f64>) -> Self {
        Self {
            model,
            p,
            sparsity: SparsityRule::SqrtP,
            beta_scheme: BetaScheme::Fixed,
            method: Method::DtSir,
            h: 10,
            gamma_grid,
            reps: 500,
            master_seed: 0,
            mode: SirMode::Raw,
            sdp: SdpSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if self.reps == 0 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        if self.h < 2 {
            return Err(Error::invalid(format!("need at least 2 slices, got {}", self.h)));
        }
        if self.gamma_grid.is_empty() {
            return Err(Error::invalid("gamma grid is empty"));
        }
        if self.gamma_grid.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::invalid("gamma grid values must be finite and >= 0"));
        }
        if self.gamma_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("gamma grid must be strictly increasing"));
        }
        self.sdp.config(self.sdp.lambda.unwrap_or(0.0)).validate()?;
        self.sparsity.resolve(self.p)
    }
}

/// `⌈γ · s · ln(p − s)⌉`.
pub fn n_for_gamma(gamma: f64, s: usize, p: usize) -> usize {
    (gamma * s as f64 * ((p - s) as f64).ln()).ceil().max(0.0) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub gamma: f64,
    pub n: usize,
    pub reps: usize,
    pub successes: usize,
    /// Too few observations to slice (or to whiten); no replicates ran.
    pub skipped: bool,
    /// SDP replicates that hit the iteration limit; counted as failures.
    pub unconverged: usize,
    /// Replicates whose numerics failed (e.g. singular covariance); counted as failures.
    pub numerical_failures: usize,
    pub wall_time: Duration,
}

impl CurvePoint {
    pub fn success_rate(&self) -> Option<f64> {
        (!self.skipped).then(|| self.successes as f64 / self.reps as f64)
    }
}

#[derive(Clone, Debug)]
pub struct EfficiencyCurve {
    pub config: CurveConfig,
    pub s: usize,
    pub points: Vec<CurvePoint>,
}

#[derive(Clone, Copy, Debug, Default)]
struct Outcome {
    success: bool,
    unconverged: bool,
    numerical: bool,
}

fn replicate(cfg: &CurveConfig, s: usize, n: usize, seed: u64) -> Result<Outcome> {
    let beta = generate_beta(cfg.p, s, cfg.beta_scheme, derive_seed(seed, &[0]))?;
    let truth = SignedSupport::of_direction(&beta);
    let data = sample_sim(&cfg.model, &beta, n, derive_seed(seed, &[1]))?;

    let estimate = (|| -> Result<(SignedSupport, bool)> {
        let v = compute_sir(&data, cfg.h, derive_seed(seed, &[2]), cfg.mode)?;
        match cfg.method {
            Method::DtSir => Ok((dt_sir(&v, s)?, true)),
            Method::Sdp => {
                let lambda = match cfg.sdp.lambda {
                    Some(l) => l,
                    None => default_lambda(&v, s)?,
                };
                let sol = sdp_solve(&v, &cfg.sdp.config(lambda))?;
                Ok((sdp_sign_recover(&sol, s)?, sol.converged))
            }
        }
    })();
    match estimate {
        Ok((est, converged)) => Ok(Outcome {
            success: converged && signed_support_match(&est, &truth)?,
            unconverged: !converged,
            numerical: false,
        }),
        Err(e) if e.is_numerical() => Ok(Outcome { numerical: true, ..Outcome::default() }),
        Err(e) => Err(e),
    }
}

/// Runs the sweep on the current rayon pool.
pub fn run_curve(cfg: &CurveConfig) -> Result<EfficiencyCurve> {
    let s = cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.gamma_grid.len());
    for (k, &gamma) in cfg.gamma_grid.iter().enumerate() {
        let started = Instant::now();
        let n = n_for_gamma(gamma, s, cfg.p);
        let skipped = n < 2 * cfg.h || (cfg.mode == SirMode::Whitened && n <= cfg.p);
        let mut point = CurvePoint {
            gamma,
            n,
            reps: cfg.reps,
            successes: 0,
            skipped,
            unconverged: 0,
            numerical_failures: 0,
            wall_time: Duration::ZERO,
        };
        if !skipped {
            let outcomes: Vec<Outcome> = (0..cfg.reps)
                .into_par_iter()
                .map(|r| replicate(cfg, s, n, derive_seed(cfg.master_seed, &[k as u64, r as u64])))
                .collect::<Result<_>>()?;
            point.successes = outcomes.iter().filter(|o| o.success).count();
            point.unconverged = outcomes.iter().filter(|o| o.unconverged).count();
            point.numerical_failures = outcomes.iter().filter(|o| o.numerical).count();
        }
        point.wall_time = started.elapsed();
        points.push(point);
    }
    Ok(EfficiencyCurve { config: cfg.clone(), s, points })
}

/// Runs the sweep on a dedicated pool of `workers` threads.
pub fn run_curve_with_workers(cfg: &CurveConfig, workers: usize) -> Result<EfficiencyCurve> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))?;
    pool.install(|| run_curve(cfg))
}
