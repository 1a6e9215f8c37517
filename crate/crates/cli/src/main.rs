//! `cpfif` command-line front end.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cpfif", version, about = "Curvature-preserving cubic fractal interpolation")]
struct Cli {
    /// JSON file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Where the points come from and how the reference spline is built.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with header `x,y`, sorted by x.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Canonical dataset: low_curvature, high_curvature or noisy_sine.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Seed of the noisy sine generator (ChaCha8).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of noisy sine samples on [0, 2π].
    #[arg(long)]
    pub noise_points: Option<usize>,
    /// Standard deviation of the noisy sine perturbation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Knot slope scheme: natural_spline or three_point.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Base function of the construction: endpoint_quintic or chord.
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PenaltyArgs {
    /// Lower bound on |λ_s| during optimization.
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// Quadrature rule of the penalty: simpson or trapezoid.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    /// Relative sweep improvement at which optimization stops.
    #[arg(long)]
    pub opt_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats, comma separated: csv, json, svg.
    #[arg(long = "format")]
    pub formats: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the interpolant and write its samples and a summary.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        /// Scaling factors: list, scalar, table1, optimize or theorem4:<ε>.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Number of grid points.
        #[arg(long)]
        grid: Option<usize>,
        /// Evaluation tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write attractor points from this many refinement levels.
        #[arg(long)]
        refine: Option<usize>,
        #[command(flatten)]
        penalty: PenaltyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate F or one of its derivatives at given abscissae; prints CSV.
    Eval {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Comma-separated abscissae.
        #[arg(long, required = true, allow_hyphen_values = true)]
        x: String,
        /// Derivative order, 0 to 2.
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Curvature of F and S on a grid plus Menger curvature at the knots.
    Curvature {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimize the curvature penalty over the scaling factors.
    Optimize {
        #[command(flatten)]
        input: InputArgs,
        /// Starting factors (list, scalar or table1).
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
        /// Quadrature grid size.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        penalty: PenaltyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Time linear, cubic, PCHIP and FIF build-and-evaluate runs.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        repetitions: Option<usize>,
        /// Comma-separated evaluation point counts.
        #[arg(long)]
        counts: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate a reference table or figure over the canonical datasets.
    Reproduce {
        target: Target,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Target {
    Table1,
    Table2,
    FigSensitivity,
    Stability,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = config::FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Fit {
            input,
            lambda,
            grid,
            tol,
            refine,
            penalty,
            output,
        } => commands::fit(&file, input, lambda, grid, tol, refine, penalty, output),
        Command::Eval {
            input,
            lambda,
            x,
            order,
            tol,
        } => commands::eval(&file, input, lambda, &x, order, tol),
        Command::Curvature {
            input,
            lambda,
            grid,
            tol,
            output,
        } => commands::curvature(&file, input, lambda, grid, tol, output),
        Command::Optimize {
            input,
            init,
            grid,
            penalty,
            output,
        } => commands::optimize(&file, input, init, grid, penalty, output),
        Command::Bench {
            input,
            repetitions,
            counts,
            output,
        } => commands::bench(&file, input, repetitions, counts, output),
        Command::Reproduce {
            target,
            seed,
            grid,
            repetitions,
            output,
        } => commands::reproduce(&file, target, seed, grid, repetitions, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cpfif: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
