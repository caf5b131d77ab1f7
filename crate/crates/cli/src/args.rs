use std::path::PathBuf;

use carlab::SamplingMode;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "carlab", version, about = "Quasi-free states on finite-dimensional self-dual CAR algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a matrix is a covariance operator for an involution.
    Validate(ValidateArgs),
    /// Decide whether a pair of covariance operators has the affine property.
    Affine(AffineArgs),
    /// Reproduce the built-in three-dimensional non-commuting example.
    Example38(ExampleArgs),
    /// Randomized search for affine pairs whose difference does not have rank 2.
    Conjecture(ConjectureArgs),
    /// Build a Jordan-Wigner representation and check the CAR relations.
    Rep(RepArgs),
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Covariance operator matrix file.
    pub operator: PathBuf,
    /// Involution file; defaults to the swap-and-conjugate involution.
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    /// Tolerance for every condition (default 1e-9·k for hermiticity and
    /// spectrum, 1e-10 for the involution relation).
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    /// Closed form when the pair commutes, numeric sweep otherwise.
    Auto,
    Analytic,
    Numeric,
}

#[derive(Args, Debug)]
pub struct AffineArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    /// Decision tolerance on the largest discrepancy.
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
    /// Mixing weight for the numeric sweep; repeatable. Defaults to an
    /// interior grid of ⌊k/2⌋+1 points.
    #[arg(long = "lambda", value_parser = open_unit)]
    pub lambdas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    pub method: MethodChoice,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    /// Also write the involution and both operators as matrix files here.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ConjectureArgs {
    /// Dimension k of the one-particle space (at most 7).
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling mode; repeatable. Defaults to all modes.
    #[arg(long = "mode", value_parser = parse_mode)]
    pub modes: Vec<SamplingMode>,
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
    /// Directory for counterexample pair files.
    #[arg(long, default_value = "counterexamples")]
    pub pairs_dir: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ParityChoice {
    Even,
    Odd,
}

#[derive(Args, Debug)]
pub struct RepArgs {
    /// Number of paired modes.
    #[arg(long)]
    pub modes: usize,
    #[arg(long, value_enum, default_value_t = ParityChoice::Even)]
    pub parity: ParityChoice,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the generator matrices here.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x < 1.0 => Ok(x),
        _ => Err(format!("`{s}` is not in (0, 1)")),
    }
}

fn parse_mode(s: &str) -> Result<SamplingMode, String> {
    s.parse::<SamplingMode>().map_err(|e| e.to_string())
}
