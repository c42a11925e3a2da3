//! `angmax`: evaluate transforms, radial maximal profiles and kernel splits,
//! and run the verification experiments.
//!
//! Exit codes: 0 success, 1 a verification flag failed, 2 configuration
//! error, 3 evaluation point outside the transform domain.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
mod config;
mod output;

use config::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] angmax_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_domain() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "angmax",
    version,
    about = "Angular maximal transforms of simple functions"
)]
struct Cli {
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory; defaults to $ANGMAX_OUT, else standard output.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON config: a file path or an inline object. Flags take precedence.
    #[arg(long, global = true, value_name = "FILE|JSON")]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one transform at a list of points.
    Transform(TransformArgs),
    /// Angular maximal function on a radial grid, with norms.
    Maxprofile(MaxprofileArgs),
    /// Run a verification experiment.
    Verify(VerifyArgs),
    /// Evaluate the split Poisson kernel, or split a convolution at one point.
    KernelSplit(KernelSplitArgs),
}

#[derive(Debug, Args)]
struct FunctionArg {
    /// `fixture:NAME`, `random:INDEX`, inline JSON, or a JSON file.
    #[arg(long = "f", value_name = "SOURCE")]
    f: Option<String>,
    /// Seed of the random family behind `random:INDEX`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(flatten)]
    function: FunctionArg,
    /// poisson, stieltjes, laplace, cauchy or hilbert.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<f64>,
    /// Complex point such as `0.5`, `1+2i`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    z: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<f64>,
}

#[derive(Debug, Args, Default)]
struct SearchArgs {
    /// Coarse angular samples per radius.
    #[arg(long)]
    coarse: Option<usize>,
    /// Geometric sample layers toward each sector edge.
    #[arg(long)]
    layers: Option<usize>,
    /// Ternary-search refinement steps.
    #[arg(long)]
    refine: Option<usize>,
}

#[derive(Debug, Args)]
struct MaxprofileArgs {
    #[command(flatten)]
    function: FunctionArg,
    #[arg(long)]
    kind: Option<String>,
    /// Exponents for the profile norms, e.g. `1.5,2,inf`.
    #[arg(long, value_delimiter = ',')]
    p: Vec<String>,
    /// `rho_min,rho_max,count`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_hi: Option<f64>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// One of theorem1..4, ray-hy, cauchy-rep, identity-sec4, splitting, lemma1.
    experiment: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Size of the random family.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<String>,
    #[arg(long)]
    grid: Option<String>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct KernelSplitArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    y: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    /// Radius of the split point; switches to convolution mode.
    #[arg(long)]
    r: Option<f64>,
    /// Angle of the split point in `(0, pi)`.
    #[arg(long)]
    theta: Option<f64>,
    #[command(flatten)]
    function: FunctionArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("angmax: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
