mod chars;
mod deriv;
mod graph;
mod parse;
mod render;
mod rep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::render::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "semilab", version, about = "Representations and derivations of graph tensor algebras")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub output: Format,
    /// Numerical tolerance for pass/fail checks.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = parse::positive_f64)]
    pub tol: f64,
    /// Degree cap for polynomial products.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub degree_cap: u64,
    /// Points on the circle (or per axis on a disk) for sup-norm grids.
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u64).range(8..))]
    pub grid: u64,
    /// Largest truncation N for profiles and Fock norms.
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    pub truncation: u64,
    #[arg(long, global = true, env = "SEMILAB_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, check and inspect graphs.
    #[command(subcommand)]
    Graph(graph::GraphCmd),
    /// Build and verify the representations attached to a cycle.
    #[command(subcommand)]
    Rep(rep::RepCmd),
    /// Derivations at a cycle representation.
    #[command(subcommand)]
    Deriv(deriv::DerivCmd),
    /// Characters and their point derivations.
    #[command(subcommand)]
    Char(chars::CharCmd),
}

/// A representation `π_{w,λ,μ}` named on the command line.
#[derive(Args, Clone, Debug)]
pub struct RepArgs {
    /// Graph JSON file.
    pub graph: PathBuf,
    /// Edge ids of the cycle, comma separated.
    #[arg(long)]
    pub cycle: String,
    /// λ as `a+bi`.
    #[arg(long, default_value = "0.5")]
    pub lambda: String,
    /// μ = e^{2πit}, given as t in turns.
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleArg {
    Circle,
    Fock,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit 2. The optional report is still printed.
    Input(String, Option<Report>),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into(), None)
    }
}

impl From<semilab::Error> for CliError {
    fn from(e: semilab::Error) -> Self {
        CliError::input(e.to_string())
    }
}

pub type CliResult = Result<Report, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.cfg;
    let result = match cli.cmd {
        Command::Graph(c) => graph::run(c, &cfg),
        Command::Rep(c) => rep::run(c, &cfg),
        Command::Deriv(c) => deriv::run(c, &cfg),
        Command::Char(c) => chars::run(c, &cfg),
    };
    match result {
        Ok(report) => {
            if let Err(e) = report.emit(cfg.output) {
                eprintln!("semilab: {e}");
                return ExitCode::from(2);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg, report)) => {
            if let Some(r) = report {
                let _ = r.emit(cfg.output);
            }
            eprintln!("semilab: {msg}");
            ExitCode::from(2)
        }
    }
}
