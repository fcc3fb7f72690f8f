//! `philab`: Young-function calculus, hypothesis audits, thresholds and the
//! two-solution solver from the command line.
//!
//! Exit codes: 0 success, 1 numeric or hypothesis failure (reports are still
//! written), 2 usage or configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "philab", version, about = "Numerical laboratory for singular Phi-Laplacian problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Directory for CSV reports and the manifest.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Selects a Young function either from a named family or from the
/// operator of a config file.
#[derive(Debug, Clone, Args)]
pub struct FunctionArgs {
    /// power, pathological, log-power or exp; the config operator when absent.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Coefficient of the power family.
    #[arg(long)]
    pub coef: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Config override `section.key=value`, repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,
    /// Sample window and density; command-specific defaults when absent.
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExampleArgs {
    /// A4, A5 or pathological-reaction.
    pub name: String,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "N")]
    pub n_dim: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Growth indices and the sampled ratio tΨ'/Ψ.
    Indices(FunctionArgs),
    /// Young conjugate and biconjugate on a sample grid.
    Conjugate(FunctionArgs),
    /// Sobolev conjugate Φ_* after the divergence test.
    SobolevConjugate {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long = "N")]
        n_dim: Option<f64>,
    },
    /// Hypothesis audit of a configured problem.
    Check(ConfigArgs),
    /// Truncation constants, case and λ*.
    LambdaStar(PipelineArgs),
    /// First solution inside the modular ball.
    Solve(PipelineArgs),
    /// First solution and the mountain-pass second solution.
    MountainPass(PipelineArgs),
    /// Full pipeline with the De Giorgi bound on the first solution.
    Degiorgi(PipelineArgs),
    /// Hypothesis audit of a built-in example.
    VerifyExample(ExampleArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Indices(a) => commands::indices(&a),
        Command::Conjugate(a) => commands::conjugate(&a),
        Command::SobolevConjugate { function, n_dim } => commands::sobolev(&function, n_dim),
        Command::Check(a) => commands::check(&a),
        Command::LambdaStar(a) => commands::pipeline(&a, commands::PipelineCommand::LambdaStar),
        Command::Solve(a) => commands::pipeline(&a, commands::PipelineCommand::Solve),
        Command::MountainPass(a) => commands::pipeline(&a, commands::PipelineCommand::MountainPass),
        Command::Degiorgi(a) => commands::pipeline(&a, commands::PipelineCommand::DeGiorgi),
        Command::VerifyExample(a) => commands::verify_example(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(commands::CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(commands::CliError::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
