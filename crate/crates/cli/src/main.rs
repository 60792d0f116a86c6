mod args;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use bergman::density::{check_plane_density, fock_density_certificate, DEFAULT_DENSITY_TOL};
use bergman::extremal::{kernel_continuity_probe, solve, subspace_convergence, SolveOptions, DEFAULT_MAX_ITER, DEFAULT_TOL};
use bergman::logconvex::{decay_check, gamma_ratio_check, liminf_probe, logconvexity_check, WeightGauge, DEFAULT_S_TOL};
use bergman::quadrature::{build_plane_grid_with, PlaneGridOptions, PolarOptions, DEFAULT_PLANE_PANEL_ORDER};
use bergman::regularity::{verify_base_identity, verify_bounds, BoundOptions, DEFAULT_BOUND_TOL};
use bergman::space::means_profile;
use bergman::{build_disc_grid, Exponents, Poly, QuadGrid, WeightSpec};
use clap::{CommandFactory, Parser};
use serde::Serialize;

use args::{Cli, Command, Common, Convergence, Density, GridArgs, Logconvex, RadiiArgs, Verify};
use config::{ConfigError, RunConfig};

const DEFAULT_DEGREE: usize = 8;
const DEFAULT_P: f64 = 2.0;
const DEFAULT_GRID_TOL: f64 = 1e-13;
const IDENTITY_TOL: f64 = 1e-8;
const MONOTONE_TOL: f64 = 1e-10;
const PLANE_R_MAX: f64 = 8.0;
const DEFAULT_SAMPLES: usize = 160;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("missing {flag} (or `{key}` in --config)\n{usage}")]
    Missing { flag: &'static str, key: &'static str, usage: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Lib(#[from] bergman::Error),
}

/// What a subcommand produced and whether all of its checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

#[derive(Serialize)]
struct Envelope<T> {
    pass: bool,
    report: T,
}

impl Outcome {
    fn json<T: Serialize>(pass: bool, report: T) -> Self {
        Self { text: output::to_json(&Envelope { pass, report }), pass }
    }
}

/// Settings after merging flags over the config file.
struct Settings {
    cfg: RunConfig,
    usage: String,
}

impl Settings {
    fn new(common: &Common, grid: Option<&GridArgs>, flags: RunConfig, path: &[&str]) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let grid = grid.cloned().unwrap_or_default();
        let flags = RunConfig {
            out: common.out.as_ref().map(|p| p.display().to_string()),
            radial_order: grid.radial_order,
            angular_order: grid.angular_order,
            max_degree: grid.max_degree,
            grid_tol: grid.grid_tol,
            ..flags
        };
        Ok(Self { cfg: flags.or(&file), usage: usage(path) })
    }

    fn missing(&self, flag: &'static str, key: &'static str) -> CliError {
        CliError::Missing { flag, key, usage: self.usage.clone() }
    }

    fn weight(&self) -> Result<WeightSpec, CliError> {
        let s = self.cfg.weight.as_deref().ok_or_else(|| self.missing("--weight", "weight"))?;
        s.parse().map_err(|e| CliError::Usage(format!("--weight: {e}")))
    }

    fn kernel(&self) -> Result<Poly, CliError> {
        let s = self.cfg.kernel.as_deref().ok_or_else(|| self.missing("--kernel", "kernel"))?;
        parse_poly("--kernel", s)
    }

    fn function(&self) -> Result<Poly, CliError> {
        let s = self.cfg.function.as_deref().ok_or_else(|| self.missing("--function", "function"))?;
        parse_poly("--function", s)
    }

    fn p(&self) -> f64 {
        self.cfg.p.unwrap_or(DEFAULT_P)
    }

    fn exponents(&self) -> Result<Exponents, CliError> {
        Ok(Exponents::new(self.p())?)
    }

    fn degree(&self) -> usize {
        self.cfg.degree.unwrap_or(DEFAULT_DEGREE)
    }

    fn out(&self) -> Option<PathBuf> {
        self.cfg.out.as_ref().map(PathBuf::from)
    }

    /// A grid resolving degree-`n` extremal problems at exponents up to
    /// `p_max` for kernels of degree `k_deg`.
    fn grid(&self, spec: &WeightSpec, n: usize, p_max: f64, k_deg: usize) -> Result<QuadGrid, CliError> {
        let angular = self.cfg.angular_order.unwrap_or((4 * n + 8).max(40));
        let grid = if spec.is_plane() {
            let need = ((n as f64) * p_max.max(2.0) / 2.0).ceil() as usize;
            let max_monomial = self.cfg.max_degree.unwrap_or(need.max(n + k_deg));
            let opts = PlaneGridOptions {
                angular_order: angular,
                panel_order: self.cfg.radial_order.unwrap_or(DEFAULT_PLANE_PANEL_ORDER),
                ..PlaneGridOptions::new(self.cfg.grid_tol.unwrap_or(DEFAULT_GRID_TOL), max_monomial)
            };
            build_plane_grid_with(spec, &opts)?
        } else {
            let radial = self.cfg.radial_order.unwrap_or((n + k_deg + 2).max(48));
            build_disc_grid(spec.radius(), radial, angular)?
        };
        Ok(grid)
    }
}

/// The usage line of the subcommand at `path`.
fn usage(path: &[&str]) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    let mut cur = &mut cmd;
    for name in path {
        cur = cur.find_subcommand_mut(name).expect("subcommand exists");
    }
    cur.render_usage().to_string()
}

/// Inline JSON when it starts with `[`, otherwise a file holding it.
fn parse_poly(flag: &str, s: &str) -> Result<Poly, CliError> {
    let text = if s.trim_start().starts_with('[') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|source| CliError::Io { path: s.to_string(), source })?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

fn radii(args: &RadiiArgs, r_max_default: f64) -> Vec<f64> {
    if !args.radii.is_empty() {
        return args.radii.clone();
    }
    let r_max = args.r_max.unwrap_or(r_max_default);
    let samples = args.samples.unwrap_or(DEFAULT_SAMPLES).max(1);
    (1..=samples).map(|i| r_max * i as f64 / samples as f64).collect()
}

fn default_r_max(spec: Option<&WeightSpec>) -> f64 {
    match spec {
        Some(s) if !s.is_plane() => s.radius(),
        _ => PLANE_R_MAX,
    }
}

fn solve_options(tol: Option<f64>, max_iter: Option<usize>) -> SolveOptions {
    SolveOptions { tol: tol.unwrap_or(DEFAULT_TOL), max_iter: max_iter.unwrap_or(DEFAULT_MAX_ITER), init: None }
}

fn max_p(ps: &[Exponents]) -> f64 {
    ps.iter().map(|e| e.p()).fold(DEFAULT_P, f64::max)
}

fn exponent_list(flags: &[f64], s: &Settings) -> Result<Vec<Exponents>, CliError> {
    let ps = if flags.is_empty() { vec![s.p()] } else { flags.to_vec() };
    Ok(ps.into_iter().map(Exponents::new).collect::<bergman::Result<_>>()?)
}

#[derive(Serialize)]
struct SolveReport {
    weight: String,
    kernel: Poly,
    solution: bergman::extremal::ExtremalSolution,
}

#[derive(Serialize)]
struct SubspaceOut {
    weight: String,
    kernel: Poly,
    dual_norm_monotone: bool,
    convergence: bergman::extremal::SubspaceReport,
}

#[derive(Serialize)]
struct WeightReport<T> {
    weight: String,
    result: T,
}

fn run(command: Command) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let (outcome, s) = match command {
        Command::Solve(a) => {
            let flags = RunConfig { weight: a.weight, p: a.p, degree: a.degree, kernel: a.kernel, tol: a.tol, ..Default::default() };
            let s = Settings::new(&a.common, Some(&a.grid), flags, &["solve"])?;
            let spec = s.weight()?;
            let k = s.kernel()?;
            let e = s.exponents()?;
            let n = s.degree();
            let grid = s.grid(&spec, n, e.p(), k.degree())?;
            let sol = solve(&k, n, e, &spec, &grid, &solve_options(s.cfg.tol, a.max_iter))?;
            let pass = sol.converged;
            (Outcome::json(pass, SolveReport { weight: spec.to_string(), kernel: k, solution: sol }), s)
        }
        Command::Verify(v) => verify(v)?,
        Command::Means(a) => {
            let flags = RunConfig { weight: a.weight, p: a.p, function: a.function, ..Default::default() };
            let s = Settings::new(&a.common, None, flags, &["means"])?;
            let spec = s.weight()?;
            let f = s.function()?;
            let profile = means_profile(&f, s.p(), &spec, &radii(&a.radii, default_r_max(Some(&spec))))?;
            (Outcome { text: profile.to_csv(), pass: true }, s)
        }
        Command::Logconvex(l) => logconvex(l)?,
        Command::Density(d) => density(d)?,
        Command::Convergence(c) => convergence(c)?,
    };
    Ok((outcome, s.out()))
}

fn verify(v: Verify) -> Result<(Outcome, Settings), CliError> {
    match v {
        Verify::BaseIdentity(a) => {
            let flags = RunConfig { weight: a.weight, function: a.function, tol: a.tol, ..Default::default() };
            let s = Settings::new(&a.common, None, flags, &["verify", "base-identity"])?;
            let spec = s.weight()?;
            let f = s.function()?;
            let tol = s.cfg.tol.unwrap_or(IDENTITY_TOL);
            let reports = exponent_list(&a.p, &s)?
                .into_iter()
                .map(|e| verify_base_identity(&f, e, &spec, &PolarOptions::default(), tol))
                .collect::<bergman::Result<Vec<_>>>()?;
            let pass = reports.iter().all(|r| r.pass);
            Ok((Outcome::json(pass, reports), s))
        }
        Verify::Disc(a) => bounds(a, false),
        Verify::Plane(a) => bounds(a, true),
    }
}

fn bounds(a: args::BoundArgs, plane: bool) -> Result<(Outcome, Settings), CliError> {
    let name = if plane { "plane" } else { "disc" };
    let flags = RunConfig { weight: a.weight, degree: a.degree, tol: a.tol, ..Default::default() };
    let s = Settings::new(&a.common, Some(&a.grid), flags, &["verify", name])?;
    let spec = s.weight()?;
    if spec.is_plane() != plane {
        return Err(CliError::Usage(format!("verify {name} needs a {name} weight, got {spec}")));
    }
    let kernels = if a.kernel.is_empty() {
        vec![s.kernel()?]
    } else {
        a.kernel.iter().map(|k| parse_poly("--kernel", k)).collect::<Result<Vec<_>, _>>()?
    };
    let exps = exponent_list(&a.p, &s)?;
    let n = s.degree();
    let k_deg = kernels.iter().map(Poly::degree).max().unwrap_or(0);
    let grid = s.grid(&spec, n, max_p(&exps), k_deg)?;
    let opts = BoundOptions { tol: s.cfg.tol.unwrap_or(DEFAULT_BOUND_TOL), solve: solve_options(a.solve_tol, None) };
    let reports = verify_bounds(&kernels, &exps, &spec, &grid, n, &opts)?;
    let pass = reports.iter().all(|r| r.pass);
    Ok((Outcome::json(pass, reports), s))
}

fn logconvex(l: Logconvex) -> Result<(Outcome, Settings), CliError> {
    match l {
        Logconvex::SIntegral(a) => {
            let flags = RunConfig { weight: a.weight, tol: a.tol, ..Default::default() };
            let s = Settings::new(&a.common, None, flags, &["logconvex", "s-integral"])?;
            let spec = s.weight()?;
            if !spec.is_plane() {
                return Err(CliError::Usage(format!("s-integral needs a plane weight, got {spec}")));
            }
            let x0 = if a.x0.is_empty() { vec![1.0, 2.0, 5.0, 10.0] } else { a.x0 };
            let rep = liminf_probe(&WeightGauge(&spec), &x0, s.cfg.tol.unwrap_or(DEFAULT_S_TOL))?;
            let pass = rep.positive;
            Ok((Outcome::json(pass, WeightReport { weight: spec.to_string(), result: rep }), s))
        }
        Logconvex::Decay(a) => {
            let flags = RunConfig { weight: a.weight, p: a.p, function: a.function, ..Default::default() };
            let s = Settings::new(&a.common, None, flags, &["logconvex", "decay"])?;
            let spec = s.weight()?;
            let f = s.function()?;
            let rep = decay_check(&f, s.p(), &spec, &radii(&a.radii, default_r_max(Some(&spec))))?;
            let pass = rep.pass;
            Ok((Outcome::json(pass, WeightReport { weight: spec.to_string(), result: rep }), s))
        }
        Logconvex::Convexity(a) => {
            let flags = RunConfig { p: a.p, function: a.function, ..Default::default() };
            let s = Settings::new(&a.common, None, flags, &["logconvex", "convexity"])?;
            let f = s.function()?;
            let rep = logconvexity_check(&f, s.p(), &radii(&a.radii, default_r_max(None)))?;
            let pass = rep.pass;
            Ok((Outcome::json(pass, rep), s))
        }
        Logconvex::Gamma(a) => {
            let s = Settings::new(&a.common, None, RunConfig::default(), &["logconvex", "gamma"])?;
            let rep = gamma_ratio_check(&a.x)?;
            let pass = rep.pass;
            Ok((Outcome::json(pass, rep), s))
        }
    }
}

fn density(d: Density) -> Result<(Outcome, Settings), CliError> {
    let (rep, s) = match d {
        Density::Check(a) => {
            let flags = RunConfig { weight: a.weight, p: a.p, tol: a.tol, ..Default::default() };
            let s = Settings::new(&a.common, None, flags, &["density", "check"])?;
            let spec = s.weight()?;
            let tol = s.cfg.tol.unwrap_or(DEFAULT_DENSITY_TOL);
            (check_plane_density(&spec, s.exponents()?, a.rho, a.beta, tol)?, s)
        }
        Density::Fock(a) => {
            let flags = RunConfig { p: a.p, ..Default::default() };
            let s = Settings::new(&a.common, None, flags, &["density", "fock"])?;
            (fock_density_certificate(a.alpha, s.exponents()?)?, s)
        }
    };
    let pass = rep.finite;
    Ok((Outcome::json(pass, rep), s))
}

fn convergence(c: Convergence) -> Result<(Outcome, Settings), CliError> {
    match c {
        Convergence::Subspace(a) => {
            let flags = RunConfig { weight: a.weight, p: a.p, kernel: a.kernel, tol: a.tol, ..Default::default() };
            let s = Settings::new(&a.common, Some(&a.grid), flags, &["convergence", "subspace"])?;
            let spec = s.weight()?;
            let k = s.kernel()?;
            let e = s.exponents()?;
            let degrees = if a.degrees.is_empty() { vec![2, 4, 6, 8] } else { a.degrees };
            let top = degrees.iter().copied().max().unwrap_or(0);
            let grid = s.grid(&spec, top, e.p(), k.degree())?;
            let rep = subspace_convergence(&k, e, &spec, &grid, &degrees, &solve_options(s.cfg.tol, None))?;
            let monotone = rep.dual_norm_monotone(MONOTONE_TOL);
            let pass = monotone && rep.rows.iter().all(|r| r.converged);
            let out = SubspaceOut { weight: spec.to_string(), kernel: k, dual_norm_monotone: monotone, convergence: rep };
            Ok((Outcome::json(pass, out), s))
        }
        Convergence::Kernel(a) => {
            let flags =
                RunConfig { weight: a.weight, p: a.p, degree: a.degree, kernel: a.kernel, tol: a.tol, ..Default::default() };
            let s = Settings::new(&a.common, Some(&a.grid), flags, &["convergence", "kernel"])?;
            let spec = s.weight()?;
            let k = s.kernel()?;
            let h = parse_poly("--direction", &a.direction)?;
            let e = s.exponents()?;
            let n = s.degree();
            let deltas = if a.deltas.is_empty() { vec![1e-1, 1e-2, 1e-3, 1e-4] } else { a.deltas };
            let grid = s.grid(&spec, n, e.p(), k.degree().max(h.degree()))?;
            let rep = kernel_continuity_probe(&k, &h, &deltas, e, &spec, &grid, n, &solve_options(s.cfg.tol, None))?;
            let pass = rep.rows.iter().all(|r| r.converged);
            Ok((Outcome::json(pass, WeightReport { weight: spec.to_string(), result: rep }), s))
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("EXTREMAL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("EXTREMAL_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("EXTREMAL_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = init_threads().and_then(|()| run(cli.command));
    match result {
        Ok((outcome, out)) => {
            if let Err(source) = output::emit(&outcome.text, out.as_deref()) {
                let path = out.map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
                eprintln!("error: {}", CliError::Io { path, source });
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed; see the report");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
