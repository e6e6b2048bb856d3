//! `fucik`: spectra, first nontrivial Fučik curve, positive solutions of the
//! semilinear problem, plots and property suites.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 a verification
//! check failed.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "fucik", version, about = "Fučik spectrum laboratory for the self-similar heat operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare computed eigenvalues with (N + k − 1)/2 and their multiplicities.
    Spectrum(SpectrumArgs),
    /// Trace the first nontrivial curve over a grid of p.
    Curve(CurveArgs),
    /// Two positive solutions of the semilinear problem.
    Nonlinear(NonlinearArgs),
    /// Render a curve CSV as SVG.
    Plot(PlotArgs),
    /// Run the identity and spectrum suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Spectral,
    Fd,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Spatial dimension N.
    #[arg(long = "n", default_value_t = 1)]
    pub dimension: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Spectral)]
    pub backend: BackendArg,
    /// Spectral cutoff (basis functions for N = 1, per axis for N = 2).
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Finite-difference node count.
    #[arg(long, default_value_t = 801)]
    pub nodes: usize,
    /// Half-width R of the computational box.
    #[arg(long, default_value_t = 12.0)]
    pub radius: f64,
    #[arg(long, env = "FUCIK_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Number of closed-form levels to check.
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    /// Allowed eigenvalue error (default 1e-12 spectral, 2e-3 fd).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    /// Direct solves at −p against c(p) + p.
    Symmetry,
    /// Random search for sign-changing points below the first grid point.
    Probe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    /// Minimax against a dense angle scan on [[2,−1],[−1,2]].
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AuxArg {
    SecondMode,
    DecayingBump,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// `a:b:step`, a single value or a comma list.
    #[arg(long = "p", allow_hyphen_values = true)]
    pub p: String,
    #[arg(long = "check", value_enum)]
    pub checks: Vec<CheckArg>,
    #[arg(long, value_enum)]
    pub oracle: Option<OracleArg>,
    /// Nodes on the discretized path (odd, ≥ 5).
    #[arg(long, default_value_t = 41)]
    pub path_nodes: usize,
    #[arg(long, value_enum, default_value_t = AuxArg::SecondMode)]
    pub aux: AuxArg,
    /// Solve every point from a cold path.
    #[arg(long)]
    pub no_warm_start: bool,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Also write an SVG of the curve.
    #[arg(long)]
    pub svg: bool,
    /// File name stem for the outputs.
    #[arg(long, default_value = "curve")]
    pub name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Notched,
    Saturating,
}

#[derive(Args, Debug)]
pub struct NonlinearArgs {
    #[arg(long, default_value_t = 801)]
    pub nodes: usize,
    #[arg(long, default_value_t = 12.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub f0: f64,
    #[arg(long, default_value_t = 1.6, allow_hyphen_values = true)]
    pub finf: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Notched)]
    pub family: FamilyArg,
    /// Seed of the random directions in the geometry scan.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, env = "FUCIK_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Curve CSV written by `curve`.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the input name with an `.svg` extension in the output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Dimension N, fixing the reference lines λ₁ = N/2 and λ₂ = (N+1)/2.
    #[arg(long = "n", default_value_t = 1)]
    pub dimension: usize,
    #[arg(long, env = "FUCIK_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Identities,
    Spectrum,
    TrivialLines,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 11)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Curve(a) => commands::curve(&a),
        Command::Nonlinear(a) => commands::nonlinear(&a),
        Command::Plot(a) => commands::plot(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(commands::Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(commands::Failure::Solve(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
