//! Command-line front end: F(a) scans, Gaussianity verdicts, scaling fits
//! and the invariant self-test.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperhs::QuadConfig;

/// Process exit status.
#[derive(Debug)]
pub enum Failure {
    /// A verdict or tolerance check did not hold.
    Verification(String),
    /// Bad flags, grids or inadmissible sources.
    Usage(String),
    /// An integral failed or did not converge.
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<hyperhs::Error> for Failure {
    fn from(e: hyperhs::Error) -> Self {
        use hyperhs::Error as E;
        match e {
            E::InvalidArgument(_) | E::Inadmissible(_) | E::DimensionMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hyperhs", version, about = "Numerical checks of Hubbard-Stratonovich identities on real hyperbolic domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate F(a), which should be identically 1.
    FScan(FScanArgs),
    /// Gaussianity verdict for a family of integrals over a source grid.
    Verify(VerifyArgs),
    /// Fit the small-splitting behaviour of a naive-measure contribution.
    Scaling(ScalingArgs),
    /// Run the invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FCase {
    O21,
    O22Double,
    O22Phi1,
    O3,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyCase {
    O11,
    O21Special,
    O21General,
    O22Special,
    O3Tail,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalingCase {
    O21Naive,
    O22Naive,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureArg {
    Conjectured,
    Naive,
}

impl From<MeasureArg> for hyperhs::Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Conjectured => hyperhs::Measure::Conjectured,
            MeasureArg::Naive => hyperhs::Measure::Naive,
        }
    }
}

/// Overrides of the quadrature configuration.
#[derive(Args, Debug, Clone, Default)]
pub struct QuadArgs {
    /// Relative tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Absolute tolerance.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Nodes per axis of Gaussian-weighted rules.
    #[arg(long)]
    pub gauss_nodes: Option<usize>,
    /// Budget of integrand evaluations per integral.
    #[arg(long)]
    pub max_evals: Option<usize>,
}

impl QuadArgs {
    /// Applies the overrides on top of `base`.
    pub fn apply(&self, base: QuadConfig) -> Result<QuadConfig, Failure> {
        let mut cfg = base;
        if let Some(v) = self.tol {
            cfg = cfg.with_rel_tol(v);
        }
        if let Some(v) = self.abs_tol {
            cfg = cfg.with_abs_tol(v);
        }
        if let Some(v) = self.gauss_nodes {
            cfg = cfg.with_gauss_nodes(v);
        }
        if let Some(v) = self.max_evals {
            cfg = cfg.with_max_evals(v);
        }
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// One-parameter grid; unset fields take per-case defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Logarithmic spacing.
    #[arg(long)]
    pub log: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct FScanArgs {
    #[arg(long, value_enum)]
    pub case: FCase,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub case: VerifyCase,
    /// Measure on the spectral domain; `o3-tail` only has a naive variant.
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    /// Source grid as `p,p,...;p,p,...`, replacing the case default. Points
    /// are `a1,a2,a` for o11, `x,w,z` for o21-general and `x,z` otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Deviation threshold of the verdict.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long, value_enum)]
    pub case: ScalingCase,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Scale the polar Jacobian by 1.01 to confirm the suite catches it.
    #[arg(long)]
    pub perturb_jacobian: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

/// Caps rayon's pool at `HYPERHS_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HYPERHS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("HYPERHS_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::FScan(a) => commands::f_scan(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Scaling(a) => commands::scaling(&a),
        Command::Selftest(a) => commands::selftest(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hyperhs: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
