use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod sweep;

use config::RunConfig;

/// Magnetic curves of the Sasakian space form ℝ^{2n+1}(−3).
#[derive(Debug, Parser)]
#[command(name = "sasmag", version)]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Tolerance profile, `strict` or `ode`. Defaults to $SASMAG_TOLERANCE, then strict.
    #[arg(long, global = true)]
    tolerance: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a closed-form magnetic curve to CSV.
    Generate(GenerateArgs),
    /// Integrate the Lorentz equation with RK4 to CSV.
    Integrate(IntegrateArgs),
    /// Frenet apparatus, residuals and branch of a trajectory CSV, as JSON.
    Analyze(AnalyzeArgs),
    /// Branch and strength recovery of a trajectory CSV, as JSON.
    Classify(AnalyzeArgs),
    /// Tabulate estimated against predicted curvatures over a (q, θ) grid.
    Sweep(SweepArgs),
    /// Randomized audit of the structure and connection identities.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Contact angle in radians.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Arc length to cover [default: 10].
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Step [default: 0.001].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Amplitudes c_i (2n+1 slopes and offset with --lambda-zero).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Option<Vec<f64>>,
    /// Phases d_i (2n intercepts with --lambda-zero).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d: Option<Vec<f64>>,
    /// Offsets h_1..h_{2n+1}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Option<Vec<f64>>,
    /// Use the non-rotating family (requires q = 2cosθ).
    #[arg(long)]
    pub lambda_zero: bool,
    /// Curve spec as JSON; replaces n, q, θ and the constants.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Initial point x1..xn,y1..yn,z.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p0: Option<Vec<f64>>,
    /// Initial unit velocity in frame components a1..an,b1..bn,c.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v0: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Trajectory CSV.
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Strengths [default: -3,-1,0.5,1,3].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub qs: Option<Vec<f64>>,
    /// Contact angles [default: π/6,π/4,π/3,π/2,2π/3].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thetas: Option<Vec<f64>>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Use sampled closed-form curves instead of integrated ones.
    #[arg(long)]
    pub closed_form: bool,
    /// Directory for sweep.csv and the plot data [default: .].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random draws per algebraic property [default: 1000].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Run only these properties.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    /// Swap in a deliberately broken φ.
    #[arg(long)]
    pub corrupt_phi: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::load(cli.config.as_deref()).and_then(|cfg| {
        let profile = || cfg.profile(cli.tolerance.as_deref());
        match &cli.command {
            Command::Generate(a) => commands::generate(a, &cfg),
            Command::Integrate(a) => commands::integrate(a, &cfg),
            Command::Analyze(a) => commands::analyze(a, &cfg, profile()?),
            Command::Classify(a) => commands::classify(a, &cfg, profile()?),
            Command::Sweep(a) => sweep::run(a, &cfg, profile()?),
            Command::Verify(a) => commands::verify(a, &cfg),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sasmag: {e}");
            e.exit_code()
        }
    }
}
