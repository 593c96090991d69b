//! Command-line surface: subcommands, flags, and their documentation.

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::OutputFormat;

/// Diffusive search with stochastic resetting: eigenvalues, survival
/// asymptotics, Monte Carlo simulation, random-target failure laws, and
/// front-speed classification.
///
/// Sweep flags accept a comma list (`5,10,20`) or a geometric range
/// `lo:hi:n`. Artifacts embed the resolved parameters and a replay line;
/// identical invocations (including seeds) produce byte-identical output.
/// Set RAYON_NUM_THREADS to bound the simulation thread count — results do
/// not depend on it.
#[derive(Debug, Parser)]
#[command(name = "reset-search", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output path; '-' writes to standard output.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,
    /// Artifact format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Principal eigenvalue, decay rate, and prefactor for the line
    /// searcher.
    Eig1d(Eig1dArgs),
    /// The same spectral quantities for the radial searcher in d >= 2.
    EigRadial(EigRadialArgs),
    /// Large-t survival asymptote exp(-lambda0 t) / M.
    Survival(SurvivalArgs),
    /// Monte Carlo survival probabilities.
    Simulate(SimulateArgs),
    /// Failure probability averaged over a random target distribution.
    TargetFail(TargetFailArgs),
    /// Minimiser, bounds, and direct value of the failure-law exponent
    /// integral.
    Laplace(LaplaceArgs),
    /// Classify a moving-target schedule against the detection front.
    SpeedClassify(SpeedClassifyArgs),
    /// Monte Carlo and analytic survival side by side.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct Eig1dArgs {
    /// Diffusion coefficient D [length^2/time].
    #[arg(long = "D", allow_negative_numbers = true)]
    pub diffusion: f64,
    /// Reset rate r [1/time].
    #[arg(long = "r", allow_negative_numbers = true)]
    pub reset_rate: f64,
    /// Target distance(s) a [length]; sweep syntax allowed.
    #[arg(long = "a", allow_negative_numbers = true)]
    pub distance: String,
}

#[derive(Debug, Args)]
pub struct EigRadialArgs {
    /// Diffusion coefficient D [length^2/time].
    #[arg(long = "D", allow_negative_numbers = true)]
    pub diffusion: f64,
    /// Reset rate r [1/time].
    #[arg(long = "r", allow_negative_numbers = true)]
    pub reset_rate: f64,
    /// Ambient dimension (2..=40).
    #[arg(long)]
    pub dim: u32,
    /// Detection radius eps0 [length].
    #[arg(long = "eps0", allow_negative_numbers = true)]
    pub target_radius: f64,
    /// Reset-point distance(s) A [length]; sweep syntax allowed.
    #[arg(long = "A", allow_negative_numbers = true)]
    pub reset_radius: String,
    /// Relative tolerance of the prefactor quadrature.
    #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SurvivalArgs {
    /// Diffusion coefficient D [length^2/time].
    #[arg(long = "D", allow_negative_numbers = true)]
    pub diffusion: f64,
    /// Reset rate r [1/time].
    #[arg(long = "r", allow_negative_numbers = true)]
    pub reset_rate: f64,
    /// Target distance a (line) or reset-point distance A (radial)
    /// [length].
    #[arg(long = "a", allow_negative_numbers = true)]
    pub distance: f64,
    /// Time grid [time]; sweep syntax allowed.
    #[arg(long = "t")]
    pub times: String,
    /// Ambient dimension; omit (or 1) for the line searcher.
    #[arg(long)]
    pub dim: Option<u32>,
    /// Detection radius eps0 [length]; required for d >= 2.
    #[arg(long = "eps0", allow_negative_numbers = true)]
    pub target_radius: Option<f64>,
    /// Relative tolerance of the radial prefactor quadrature.
    #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Diffusion coefficient D [length^2/time].
    #[arg(long = "D", allow_negative_numbers = true)]
    pub diffusion: f64,
    /// Reset rate r [1/time].
    #[arg(long = "r", allow_negative_numbers = true)]
    pub reset_rate: f64,
    /// Target distance a (line) or reset-point distance A (radial)
    /// [length].
    #[arg(long = "a", allow_negative_numbers = true)]
    pub distance: f64,
    /// Survival checkpoints [time], strictly increasing; sweep syntax
    /// allowed.
    #[arg(long = "t")]
    pub times: String,
    /// Number of trajectories.
    #[arg(long)]
    pub n: u64,
    /// Run seed; with the trajectory index it determines every draw.
    #[arg(long)]
    pub seed: u64,
    /// Ambient dimension; omit (or 1) for the exact line engine.
    #[arg(long)]
    pub dim: Option<u32>,
    /// Detection radius eps0 [length]; required for d >= 2.
    #[arg(long = "eps0", allow_negative_numbers = true)]
    pub target_radius: Option<f64>,
    /// Euler-Maruyama step [time]; required for d >= 2, rejected on the
    /// line (whose engine is exact).
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Pair trajectories antithetically (mirrored noise).
    #[arg(long)]
    pub antithetic: bool,
}

/// Family of the random target law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    /// Isotropic normal with scale sigma: B = 1/(2 sigma^2), l = 2.
    Gaussian,
    /// Exponential radial tail with the given rate: B = rate, l = 1.
    Exponential,
    /// Stretched-exponential tail exp(-B |x|^l) with explicit B and l.
    Stretched,
}

impl DistKind {
    pub fn name(self) -> &'static str {
        match self {
            DistKind::Gaussian => "gaussian",
            DistKind::Exponential => "exponential",
            DistKind::Stretched => "stretched",
        }
    }
}

#[derive(Debug, Args)]
pub struct TargetFailArgs {
    /// Target law family.
    #[arg(long, value_enum)]
    pub dist: DistKind,
    /// Gaussian scale sigma [length] (dist = gaussian).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Exponential rate [1/length] (dist = exponential).
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Tail coefficient B (dist = stretched).
    #[arg(long = "B", allow_negative_numbers = true)]
    pub tail_coefficient: Option<f64>,
    /// Stretch exponent l; required for dist = stretched, otherwise an
    /// optional consistency check (gaussian implies 2, exponential 1).
    #[arg(long = "l", allow_negative_numbers = true)]
    pub stretch_exponent: Option<f64>,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    /// Detection radius eps0 [length]; required for d >= 2.
    #[arg(long = "eps0", allow_negative_numbers = true)]
    pub target_radius: Option<f64>,
    /// Diffusion coefficient D [length^2/time].
    #[arg(long = "D", allow_negative_numbers = true)]
    pub diffusion: f64,
    /// Reset rate r [1/time].
    #[arg(long = "r", allow_negative_numbers = true)]
    pub reset_rate: f64,
    /// Time grid [time]; sweep syntax allowed.
    #[arg(long = "t")]
    pub times: String,
    /// Relative tolerance of the failure integral.
    #[arg(long, default_value_t = 1e-7, allow_negative_numbers = true)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct LaplaceArgs {
    /// Tail coefficient B of the target law.
    #[arg(long = "B", allow_negative_numbers = true)]
    pub tail_coefficient: f64,
    /// Stretch exponent l of the target law.
    #[arg(long = "l", allow_negative_numbers = true)]
    pub stretch_exponent: f64,
    /// Exponential decay rate kappa of the eigenvalue [1/length].
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Rate prefactor R [1/time].
    #[arg(long = "R", allow_negative_numbers = true)]
    pub rate_prefactor: f64,
    /// Time grid [time]; sweep syntax allowed.
    #[arg(long = "t")]
    pub times: String,
    /// Tightening parameter of the two-sided bounds, in (0, 1).
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Prefactor of the lower bound.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct SpeedClassifyArgs {
    /// Diffusion coefficient D [length^2/time].
    #[arg(long = "D", allow_negative_numbers = true)]
    pub diffusion: f64,
    /// Reset rate r [1/time].
    #[arg(long = "r", allow_negative_numbers = true)]
    pub reset_rate: f64,
    /// Ambient dimension.
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    /// Detection radius eps0 [length]; required for d >= 2.
    #[arg(long = "eps0", allow_negative_numbers = true)]
    pub target_radius: Option<f64>,
    /// Schedule coefficient of ln t [length].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Schedule coefficient of ln ln t [length].
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Schedule constant offset [length].
    #[arg(long = "c", default_value_t = 0.0, allow_negative_numbers = true)]
    pub constant: f64,
    /// Probe time grid [time], strictly increasing, each > e; sweep syntax
    /// allowed.
    #[arg(long = "t")]
    pub times: String,
    /// Divergence threshold of the trend classifier.
    #[arg(long, default_value_t = reset_search::speed::DEFAULT_THRESHOLD, allow_negative_numbers = true)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Diffusion coefficient D [length^2/time].
    #[arg(long = "D", allow_negative_numbers = true)]
    pub diffusion: f64,
    /// Reset rate r [1/time].
    #[arg(long = "r", allow_negative_numbers = true)]
    pub reset_rate: f64,
    /// Target distance a (line) or reset-point distance A (radial)
    /// [length].
    #[arg(long = "a", allow_negative_numbers = true)]
    pub distance: f64,
    /// Survival checkpoints [time], strictly increasing; sweep syntax
    /// allowed.
    #[arg(long = "t")]
    pub times: String,
    /// Number of trajectories.
    #[arg(long)]
    pub n: u64,
    /// Run seed; with the trajectory index it determines every draw.
    #[arg(long)]
    pub seed: u64,
    /// Ambient dimension; omit (or 1) for the exact line engine.
    #[arg(long)]
    pub dim: Option<u32>,
    /// Detection radius eps0 [length]; required for d >= 2.
    #[arg(long = "eps0", allow_negative_numbers = true)]
    pub target_radius: Option<f64>,
    /// Euler-Maruyama step [time]; required for d >= 2, rejected on the
    /// line.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Pair trajectories antithetically (mirrored noise).
    #[arg(long)]
    pub antithetic: bool,
    /// Relative tolerance of the radial prefactor quadrature.
    #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
    pub tol: f64,
}
