//! One driver per subcommand: resolve flags over file values over defaults,
//! run, write CSV outputs plus `manifest.toml`.

use std::path::PathBuf;

use serde::Serialize;
use sparsir_core::experiments::SdpSettings;
use sparsir_core::rng::derive_seed;
use sparsir_core::{
    default_lambda, fit_decay, generate_beta, run_curve, run_curve_with_workers, sample_sim, sdp_sign_recover,
    sdp_solve, stability_diagnostic, BetaScheme, CurveConfig, Link, Method, ModelSpec, SdpBackend, SdpConfig,
    SirMode, SparsityRule,
};

use crate::cli::{Cli, Command, Common, CurveArgs, DiagnoseArgs, RecoverArgs, SdpFlags, SdpSolveArgs, SimulateArgs};
use crate::config::{CurveSection, DiagnoseSection, FileConfig, RecoverSection, SdpSolveSection, SimulateSection};
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::{emit, ingest_csv, read_matrix_csv, recover_real, CliError, CliResult, RecoverOptions};

pub const DEFAULT_OUT: &str = "sparsir-out";
pub const DEFAULT_H_GRID: [usize; 4] = [5, 10, 20, 40];

/// Files written by a run, relative to `dir`; the manifest is last.
#[derive(Debug)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

pub fn run(cli: Cli) -> CliResult<RunOutput> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Curve(a) => curve(&a),
        Command::Diagnose(a) => diagnose(&a),
        Command::Recover(a) => recover(&a),
        Command::SdpSolve(a) => sdp(&a),
    }
}

struct Context {
    file: FileConfig,
    config_path: Option<PathBuf>,
    out: PathBuf,
    workers: Option<usize>,
    cli_seed: Option<u64>,
}

impl Context {
    fn new(common: &Common) -> CliResult<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let out = common.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let workers = common.workers.or(file.workers);
        if workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
        Ok(Self { config_path: common.config.clone(), out, workers, cli_seed: common.seed, file })
    }

    fn seed(&self, section: Option<u64>) -> u64 {
        self.cli_seed.or(section).or(self.file.seed).unwrap_or(0)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn finish<C: Serialize>(&self, command: &str, seed: u64, config: &C, mut files: Vec<String>) -> CliResult<RunOutput> {
        let mut m = RunManifest::new(command, self.config_path.as_deref(), &self.out, seed, config);
        m.workers = self.workers;
        m.files = files.clone();
        m.write(&self.out)?;
        files.push(MANIFEST_FILE.to_string());
        Ok(RunOutput { dir: self.out.clone(), files })
    }
}

fn require<T>(value: Option<T>, command: &str, key: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Config(format!("{command}: `{key}` is required (set it in [{command}] or pass --{})", key.replace('_', "-"))))
}

fn model_spec(name: &str, noise_sd: f64) -> CliResult<ModelSpec> {
    Ok(ModelSpec::new(Link::from_name(name)?, noise_sd)?)
}

/// Fills solver keys with their defaults; `lambda` stays unset when the default rule applies.
struct SolverKeys {
    lambda: Option<f64>,
    backend: String,
    tol: f64,
    max_iter: usize,
    step: Option<f64>,
}

impl SolverKeys {
    fn resolve(flags: &SdpFlags, lambda: Option<f64>, backend: &Option<String>, tol: Option<f64>, max_iter: Option<usize>, step: Option<f64>) -> CliResult<Self> {
        let d = SdpConfig::default();
        let backend = flags.backend.clone().or_else(|| backend.clone()).unwrap_or_else(|| d.backend.name().to_string());
        let keys = Self {
            lambda: flags.lambda.or(lambda),
            backend: SdpBackend::from_name(&backend)?.name().to_string(),
            tol: flags.tol.or(tol).unwrap_or(d.tol),
            max_iter: flags.max_iter.or(max_iter).unwrap_or(d.max_iter),
            step: step.or(d.step),
        };
        keys.settings()?.config(keys.lambda.unwrap_or(0.0)).validate()?;
        Ok(keys)
    }

    fn settings(&self) -> CliResult<SdpSettings> {
        Ok(SdpSettings {
            lambda: self.lambda,
            backend: SdpBackend::from_name(&self.backend)?,
            tol: self.tol,
            max_iter: self.max_iter,
            step: self.step,
        })
    }
}

fn simulate(a: &SimulateArgs) -> CliResult<RunOutput> {
    let ctx = Context::new(&a.common)?;
    let f = &ctx.file.simulate;
    let seed = ctx.seed(f.seed);
    let eff = SimulateSection {
        model: Some(require(a.model.clone().or_else(|| f.model.clone()), "simulate", "model")?),
        noise_sd: Some(a.noise_sd.or(f.noise_sd).unwrap_or(1.0)),
        p: Some(require(a.p.or(f.p), "simulate", "p")?),
        s: Some(require(a.s.or(f.s), "simulate", "s")?),
        beta: Some(a.beta.clone().or_else(|| f.beta.clone()).unwrap_or_else(|| "fixed".into())),
        n: Some(require(a.n.or(f.n), "simulate", "n")?),
        seed: Some(seed),
    };
    let model = model_spec(eff.model.as_deref().unwrap_or_default(), eff.noise_sd.unwrap_or(1.0))?;
    let scheme = BetaScheme::from_name(eff.beta.as_deref().unwrap_or_default())?;
    let (p, s, n) = (eff.p.unwrap_or(0), eff.s.unwrap_or(0), eff.n.unwrap_or(0));
    let beta = generate_beta(p, s, scheme, derive_seed(seed, &[0]))?;
    let data = sample_sim(&model, &beta, n, derive_seed(seed, &[1]))?;
    emit::emit_dataset_csv(&data, &ctx.path("dataset.csv"))?;
    emit::emit_beta_csv(&beta, &ctx.path("beta.csv"))?;
    eprintln!("simulate: n = {n}, p = {p}, s = {s}, model = {}", model.name());
    ctx.finish("simulate", seed, &eff, vec!["dataset.csv".into(), "beta.csv".into()])
}

fn curve(a: &CurveArgs) -> CliResult<RunOutput> {
    let ctx = Context::new(&a.common)?;
    let f = &ctx.file.curve;
    let seed = ctx.seed(f.seed);
    let keys = SolverKeys::resolve(&a.sdp, f.lambda, &f.backend, f.tol, f.max_iter, f.step)?;
    let s = a.s.or(f.s);
    let sparsity = if a.s.is_some() { None } else { f.sparsity.clone() };
    if s.is_some() && sparsity.is_some() {
        return Err(CliError::Config("curve: set either `s` or `sparsity`, not both".into()));
    }
    let eff = CurveSection {
        model: Some(require(a.model.clone().or_else(|| f.model.clone()), "curve", "model")?),
        noise_sd: Some(a.noise_sd.or(f.noise_sd).unwrap_or(1.0)),
        p: Some(require(a.p.or(f.p), "curve", "p")?),
        sparsity: if s.is_none() { Some(sparsity.unwrap_or_else(|| "sqrt".into())) } else { None },
        s,
        beta: Some(a.beta.clone().or_else(|| f.beta.clone()).unwrap_or_else(|| "fixed".into())),
        method: Some(a.method.clone().or_else(|| f.method.clone()).unwrap_or_else(|| "dt-sir".into())),
        mode: Some(a.mode.clone().or_else(|| f.mode.clone()).unwrap_or_else(|| "raw".into())),
        h: Some(a.h.or(f.h).unwrap_or(10)),
        gamma_grid: Some(require(a.gamma_grid.clone().or_else(|| f.gamma_grid.clone()), "curve", "gamma_grid")?),
        reps: Some(a.reps.or(f.reps).unwrap_or(500)),
        seed: Some(seed),
        lambda: keys.lambda,
        backend: Some(keys.backend.clone()),
        tol: Some(keys.tol),
        max_iter: Some(keys.max_iter),
        step: keys.step,
    };
    let sparsity = match (eff.s, eff.sparsity.as_deref()) {
        (Some(s), _) => SparsityRule::Explicit(s),
        (None, Some("sqrt")) => SparsityRule::SqrtP,
        (None, Some("log")) => SparsityRule::LogP,
        (None, other) => return Err(CliError::Config(format!("curve: unknown sparsity rule {other:?} (expected sqrt or log)"))),
    };
    let mut cfg = CurveConfig::new(
        model_spec(eff.model.as_deref().unwrap_or_default(), eff.noise_sd.unwrap_or(1.0))?,
        eff.p.unwrap_or(0),
        eff.gamma_grid.clone().unwrap_or_default(),
    );
    cfg.sparsity = sparsity;
    cfg.beta_scheme = BetaScheme::from_name(eff.beta.as_deref().unwrap_or_default())?;
    cfg.method = Method::from_name(eff.method.as_deref().unwrap_or_default())?;
    cfg.mode = SirMode::from_name(eff.mode.as_deref().unwrap_or_default())?;
    cfg.h = eff.h.unwrap_or(10);
    cfg.reps = eff.reps.unwrap_or(500);
    cfg.master_seed = seed;
    cfg.sdp = keys.settings()?;

    let result = match ctx.workers {
        Some(w) => run_curve_with_workers(&cfg, w)?,
        None => run_curve(&cfg)?,
    };
    for pt in &result.points {
        let rate = pt.success_rate().map(|r| format!("{r:.3}")).unwrap_or_else(|| "skipped".into());
        eprintln!("gamma = {:<6} n = {:<6} success = {rate} ({:.1}s)", pt.gamma, pt.n, pt.wall_time.as_secs_f64());
    }
    emit::emit_curve_csv(&result, &ctx.path("curve.csv"))?;
    emit::emit_curve_failures_csv(&result, &ctx.path("curve_failures.csv"))?;
    ctx.finish("curve", seed, &eff, vec!["curve.csv".into(), "curve_failures.csv".into()])
}

fn diagnose(a: &DiagnoseArgs) -> CliResult<RunOutput> {
    let ctx = Context::new(&a.common)?;
    let f = &ctx.file.diagnose;
    let seed = ctx.seed(f.seed);
    let defaults = || Link::benchmarks().iter().map(|l| l.name().to_string()).collect();
    let eff = DiagnoseSection {
        models: Some(a.model.clone().or_else(|| f.models.clone()).unwrap_or_else(defaults)),
        noise_sd: Some(a.noise_sd.or(f.noise_sd).unwrap_or(1.0)),
        h_grid: Some(a.h_grid.clone().or_else(|| f.h_grid.clone()).unwrap_or_else(|| DEFAULT_H_GRID.to_vec())),
        mc_n: Some(a.mc_n.or(f.mc_n).unwrap_or(1_000_000)),
        seed: Some(seed),
    };
    let h_grid = eff.h_grid.clone().unwrap_or_default();
    let mut diags = Vec::new();
    let mut fits = Vec::new();
    for (i, name) in eff.models.iter().flatten().enumerate() {
        let model = model_spec(name, eff.noise_sd.unwrap_or(1.0))?;
        let d = stability_diagnostic(&model, &h_grid, eff.mc_n.unwrap_or(0), derive_seed(seed, &[i as u64, 0]))?;
        let fit = match fit_decay(&d, derive_seed(seed, &[i as u64, 1])) {
            Ok(fit) => {
                eprintln!("{name}: kappa = {:.3} (95% upper {:.3})", fit.kappa, fit.kappa_upper95);
                Some(fit)
            }
            Err(e) => {
                eprintln!("{name}: no decay fit ({e})");
                None
            }
        };
        fits.push((d.model.clone(), fit));
        diags.push(d);
    }
    emit::emit_stability_slices_csv(&diags, &ctx.path("stability_slices.csv"))?;
    emit::emit_stability_decay_csv(&diags, &ctx.path("stability_decay.csv"))?;
    emit::emit_stability_fit_csv(&fits, &ctx.path("stability_fit.csv"))?;
    let files = vec!["stability_slices.csv".into(), "stability_decay.csv".into(), "stability_fit.csv".into()];
    ctx.finish("diagnose", seed, &eff, files)
}

fn recover(a: &RecoverArgs) -> CliResult<RunOutput> {
    let ctx = Context::new(&a.common)?;
    let f = &ctx.file.recover;
    let seed = ctx.seed(f.seed);
    let keys = SolverKeys::resolve(&a.sdp, f.lambda, &f.backend, f.tol, f.max_iter, f.step)?;
    let mut eff = RecoverSection {
        input: Some(require(a.input.clone().or_else(|| f.input.clone()), "recover", "input")?),
        y_column: Some(a.y_column.clone().or_else(|| f.y_column.clone()).unwrap_or_else(|| "y".into())),
        s: Some(require(a.s.or(f.s), "recover", "s")?),
        h: Some(a.h.or(f.h).unwrap_or(10)),
        method: Some(a.method.clone().or_else(|| f.method.clone()).unwrap_or_else(|| "dt-sir".into())),
        seed: Some(seed),
        lambda: keys.lambda,
        backend: Some(keys.backend.clone()),
        tol: Some(keys.tol),
        max_iter: Some(keys.max_iter),
        step: keys.step,
    };
    let input = eff.input.clone().unwrap_or_default();
    let table = ingest_csv(&input, eff.y_column.as_deref().unwrap_or_default())?;
    if table.rejected_rows > 0 {
        eprintln!("{}: rejected {} rows with missing values", input.display(), table.rejected_rows);
    }
    let opts = RecoverOptions {
        s: eff.s.unwrap_or(0),
        h: eff.h.unwrap_or(10),
        method: Method::from_name(eff.method.as_deref().unwrap_or_default())?,
        seed,
        sdp: keys.settings()?,
    };
    let report = recover_real(&table, &opts)?;
    eff.lambda = report.lambda;
    if report.sdp_converged == Some(false) {
        eprintln!("warning: SDP did not converge within {} iterations; ranking uses the last iterate", keys.max_iter);
    }
    emit::emit_recover_csv(&report, &ctx.path("recover.csv"))?;
    eprintln!(
        "recover: n = {}, p = {}, selected = {}",
        table.n(),
        table.p(),
        report.selected().map(|r| r.name.as_str()).collect::<Vec<_>>().join(",")
    );
    ctx.finish("recover", seed, &eff, vec!["recover.csv".into()])
}

fn sdp(a: &SdpSolveArgs) -> CliResult<RunOutput> {
    let ctx = Context::new(&a.common)?;
    let f = &ctx.file.sdp_solve;
    let seed = ctx.seed(None);
    let keys = SolverKeys::resolve(&a.sdp, f.lambda, &f.backend, f.tol, f.max_iter, f.step)?;
    let input: PathBuf = require(a.input.clone().or_else(|| f.input.clone()), "sdp-solve", "input")?;
    let s = a.s.or(f.s);
    let m = read_matrix_csv(&input)?;
    let lambda = match (keys.lambda, s) {
        (Some(l), _) => l,
        (None, Some(s)) => default_lambda(&m, s)?,
        (None, None) => return Err(CliError::Config("sdp-solve: give `lambda`, or `s` to use the default penalty".into())),
    };
    let eff = SdpSolveSection {
        input: Some(input),
        s,
        lambda: Some(lambda),
        backend: Some(keys.backend.clone()),
        tol: Some(keys.tol),
        max_iter: Some(keys.max_iter),
        step: keys.step,
    };
    let sol = sdp_solve(&m, &keys.settings()?.config(lambda))?;
    if !sol.converged {
        eprintln!("warning: not converged after {} iterations (residual {:e})", sol.iterations, sol.residual);
    }
    emit::emit_matrix_csv(&sol.z, &ctx.path("z.csv"))?;
    emit::emit_sdp_summary_csv(&sol, lambda, &keys.backend, &ctx.path("sdp_summary.csv"))?;
    let mut files = vec!["z.csv".to_string(), "sdp_summary.csv".to_string()];
    if let Some(s) = s {
        emit::emit_signs_csv(&sdp_sign_recover(&sol, s)?, &ctx.path("signs.csv"))?;
        files.push("signs.csv".into());
    }
    eprintln!("sdp-solve: objective = {}, iterations = {}, rank1_gap = {:e}", sol.objective, sol.iterations, sol.rank1_gap);
    ctx.finish("sdp-solve", seed, &eff, files)
}
