use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "shapesum", version, about = "Shape summation of G2 and the Weierstrass p-function")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a single quantity.
    Eval {
        #[command(subcommand)]
        quantity: EvalQuantity,
    },
    /// Tabulate the residual function over a grid of tau values (integral method).
    Sweep(SweepArgs),
    /// Run the identity and cross-method check suite.
    Verify(VerifyArgs),
    /// Describe builtin shapes, or validate a given one.
    Shapes(ShapesArgs),
}

#[derive(Debug, Subcommand)]
pub enum EvalQuantity {
    /// Weight-2 Eisenstein series G2(tau), or its shape summation with --method lattice.
    G2(EvalArgs),
    /// Residual function E(K, tau).
    Residual(EvalArgs),
    /// Weierstrass p-function, or its shape summation with --method lattice.
    Wp(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Lattice,
    Integral,
    Closed,
    /// Series form: the absolutely convergent G2 rewriting, or the brute-force p sum.
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonOutput {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long = "out")]
    pub out_path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// rect:c=<float>, disk, diamond, or file:<path>
    #[arg(long)]
    pub shape: Option<String>,
    /// Modular parameter, written a+bi.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: String,
    /// Argument of the p-function, written a+bi.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Comma-separated lambda schedule for lattice sums.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<u64>>,
    #[arg(long)]
    pub no_extrapolate: bool,
    /// Tolerance for reference series.
    #[arg(long, default_value_t = 1e-14)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_subdivisions: usize,
    /// Truncation radius for the brute-force p-function sum.
    #[arg(long, default_value_t = 400)]
    pub radius: u64,
    #[command(flatten)]
    pub out: CommonOutput,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub shape: String,
    #[arg(long, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long)]
    pub re_steps: usize,
    #[arg(long)]
    pub im_min: f64,
    #[arg(long)]
    pub im_max: f64,
    #[arg(long)]
    pub im_steps: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_subdivisions: usize,
    #[command(flatten)]
    pub out: CommonOutput,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Skip the full-schedule lattice checks.
    #[arg(long)]
    pub quick: bool,
    /// Emit the check results as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long = "out")]
    pub out_path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShapesArgs {
    #[arg(long)]
    pub shape: Option<String>,
    #[command(flatten)]
    pub out: CommonOutput,
}
