use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Extremal problems, integral means and regularity bounds in weighted
/// Bergman and Fock type spaces.
///
/// Weights are written `fock:alpha=1`, `fockplus:alpha=1`, `affine:a=2,b=1,R=1`
/// or `power:beta=2,R=1`. Polynomials (kernels, test functions) are JSON arrays
/// of coefficients from the constant term up, each a number or a `[re, im]`
/// pair, given inline or as a path to a file holding the array.
///
/// Exit status: 0 when every check passes, 1 when a check fails or a solve
/// does not converge, 2 on usage, config, IO or argument errors.
/// EXTREMAL_THREADS sets the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "bergman", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremal polynomial of degree at most n for a kernel; JSON report.
    Solve(SolveArgs),
    /// Regularity bounds and the area identity; JSON report.
    #[command(subcommand)]
    Verify(Verify),
    /// Profile of M_p, D_p and N_p over radii; CSV.
    Means(MeansArgs),
    /// Growth gauges, decay and log-convexity of integral means; JSON report.
    #[command(subcommand)]
    Logconvex(Logconvex),
    /// Integrability conditions for density of polynomials; JSON report.
    #[command(subcommand)]
    Density(Density),
    /// Behaviour of extremal polynomials under refinement; JSON report.
    #[command(subcommand)]
    Convergence(Convergence),
}

/// Settings shared by every subcommand. Flags take precedence over `--config`.
#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// TOML file with any of: weight, p, degree, kernel, function, tol,
    /// grid_tol, radial_order, angular_order, max_degree, out.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Quadrature grid settings.
#[derive(Debug, Args, Clone, Default)]
pub struct GridArgs {
    /// Gauss-Legendre nodes: radial nodes on a disc [default: max(48, n + deg k + 2)],
    /// nodes per radial cell on the plane [default: 24].
    #[arg(long, value_name = "N")]
    pub radial_order: Option<usize>,
    /// Equispaced angles [default: max(40, 4n + 8)].
    #[arg(long, value_name = "N")]
    pub angular_order: Option<usize>,
    /// Largest monomial index the plane grid resolves
    /// [default: max(ceil(n max(p, 2)/2), n + deg k)].
    #[arg(long, value_name = "M")]
    pub max_degree: Option<usize>,
    /// Discarded tail of plane moments [default: 1e-13].
    #[arg(long, value_name = "TOL")]
    pub grid_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Weight, e.g. fock:alpha=1 (required here or in --config).
    #[arg(long)]
    pub weight: Option<String>,
    /// Exponent p > 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
    /// Degree n of the polynomial subspace [default: 8].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Kernel polynomial, inline JSON or a file (required here or in --config).
    #[arg(long)]
    pub kernel: Option<String>,
    /// Orthogonality residual required for convergence [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration limit of the solver [default: 10000].
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Bound on the means of disc extremal polynomials, for each kernel and p.
    Disc(BoundArgs),
    /// Bound on D_p(inf, f) of plane extremal polynomials, for each kernel and p.
    Plane(BoundArgs),
    /// The area identity for a polynomial on a disc weight, for each p.
    BaseIdentity(IdentityArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub weight: Option<String>,
    /// Exponents, repeated or comma separated [default: 2].
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Kernels, repeated (required here or in --config).
    #[arg(long)]
    pub kernel: Vec<String>,
    /// Degree n of the polynomial subspace [default: 8].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Relative tolerance of the inequality [default: 1e-6].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Orthogonality residual required of each solve [default: 1e-8].
    #[arg(long)]
    pub solve_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub weight: Option<String>,
    /// Test polynomial, inline JSON or a file.
    #[arg(long)]
    pub function: Option<String>,
    /// Exponents, repeated or comma separated [default: 2].
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Pass if |lhs - rhs| < tol (1 + |lhs|) [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Radii are either listed or spread evenly over (0, r-max].
#[derive(Debug, Args, Clone)]
pub struct RadiiArgs {
    /// Explicit increasing radii, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r_max", "samples"])]
    pub radii: Vec<f64>,
    /// Largest radius [default: R on a disc, 8 on the plane].
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of radii r_max i/samples, i = 1..samples [default: 160].
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MeansArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub radii: RadiiArgs,
    #[arg(long)]
    pub weight: Option<String>,
    /// Polynomial, inline JSON or a file.
    #[arg(long)]
    pub function: Option<String>,
    /// Exponent p >= 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Logconvex {
    /// S(x0, lambda) for the gauge lambda = -1/w'(x^2) of a plane weight.
    SIntegral(SIntegralArgs),
    /// Decay of r^3 M_p^p(r, f) w(r^2) beyond its peak on a plane weight.
    Decay(DecayArgs),
    /// Convexity of ln M_p(e^X, f) in X.
    Convexity(ConvexityArgs),
    /// Gamma(x, x) against its leading asymptotic term.
    Gamma(GammaArgs),
}

#[derive(Debug, Args)]
pub struct SIntegralArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub weight: Option<String>,
    /// Base points, comma separated [default: 1,2,5,10].
    #[arg(long, value_delimiter = ',')]
    pub x0: Vec<f64>,
    /// Tolerance of the tail integral [default: 1e-13].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub radii: RadiiArgs,
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long)]
    pub function: Option<String>,
    /// Exponent p >= 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub radii: RadiiArgs,
    #[arg(long)]
    pub function: Option<String>,
    /// Exponent p >= 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[command(flatten)]
    pub common: Common,
    /// Points, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    pub x: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Density {
    /// Both density integrals for a weight; passes when both are finite.
    Check(DensityCheckArgs),
    /// The check for (1 + |z|^2) e^{-alpha |z|^2} with rho = 0.5, beta = 0.75.
    Fock(DensityFockArgs),
}

#[derive(Debug, Args)]
pub struct DensityCheckArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub weight: Option<String>,
    /// Exponent p > 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = bergman::density::CERTIFICATE_RHO)]
    pub rho: f64,
    #[arg(long, default_value_t = bergman::density::CERTIFICATE_BETA)]
    pub beta: f64,
    /// Tolerance of the integrals [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DensityFockArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Exponent p > 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Convergence {
    /// Dual norms and distances of extremal polynomials on nested subspaces.
    Subspace(SubspaceArgs),
    /// Distance between extremal polynomials of k + delta h and k.
    Kernel(KernelArgs),
}

#[derive(Debug, Args)]
pub struct SubspaceArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long)]
    pub kernel: Option<String>,
    /// Exponent p > 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
    /// Increasing degrees, comma separated [default: 2,4,6,8].
    #[arg(long, value_delimiter = ',')]
    pub degrees: Vec<usize>,
    /// Orthogonality residual required of each solve [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long)]
    pub kernel: Option<String>,
    /// Perturbation direction h, inline JSON or a file.
    #[arg(long)]
    pub direction: String,
    /// Perturbation sizes, comma separated [default: 1e-1,1e-2,1e-3,1e-4].
    #[arg(long, value_delimiter = ',')]
    pub deltas: Vec<f64>,
    /// Exponent p > 1 [default: 2].
    #[arg(long)]
    pub p: Option<f64>,
    /// Degree n of the polynomial subspace [default: 8].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Orthogonality residual required of each solve [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
}
