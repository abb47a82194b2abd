//! `richclub` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or output error, 2 infeasible constraints,
//! 3 unreadable or malformed input, 4 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use richclub::Error;

#[derive(Parser)]
#[command(name = "richclub", version, about = "Maximal-entropy null models, diagnostics and soft communities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a null model and write its k/k⁺ sequences, entropy and residuals.
    Ensemble(EnsembleArgs),
    /// Write knn, coefficient-of-variation and IPR curves plus the detected cut-off.
    Diagnose(CommonArgs),
    /// Partition by recursive spectral bisection (soft mode with --model2).
    Communities(CommunityArgs),
    /// Repeat the community pipeline over randomised tie orders.
    Consensus(ConsensusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[value(rename_all = "UPPER")]
pub enum ModelArg {
    Me1,
    Me2,
    Me3,
    Ng,
    Rr1,
    Rr2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[value(rename_all = "lower")]
pub enum DirectionArg {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[value(rename_all = "lower")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[value(rename_all = "lower")]
pub enum LabelsArg {
    Integer,
    Mixed,
}

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct CommonArgs {
    /// Edge list: one `u v` pair per line, `#` comments.
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "ME1")]
    pub model: ModelArg,
    /// Second model; switches communities and consensus to the soft matrix
    /// and adds its curves to diagnose.
    #[arg(long, value_enum)]
    pub model2: Option<ModelArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "maximize")]
    pub direction: DirectionArg,
    /// Consecutive rejected proposals before the k⁺ search stops (default 50·N).
    #[arg(long)]
    pub stall_limit: Option<usize>,
    /// Break degree ties with the seed instead of by ascending node id.
    #[arg(long)]
    pub shuffle_ties: bool,
    #[arg(long, value_enum, default_value = "integer")]
    pub labels: LabelsArg,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv,json")]
    pub format: Vec<FormatArg>,
}

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Also write every pair's p, e and s.
    #[arg(long)]
    pub dump_probabilities: bool,
}

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct CommunityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Only accept splits that increase Q.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct ConsensusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub community: CommunityArgs,
    #[arg(long, default_value_t = richclub::consensus::DEFAULT_RUNS)]
    pub runs: usize,
    /// Runs a linked pair must share a community in to join a core (default: all).
    #[arg(long)]
    pub threshold: Option<usize>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InfeasibleConstraints(_) | Error::InfeasibleNg { .. } => 2,
            Error::Parse { .. } | Error::SelfLoop { .. } | Error::DuplicateEdge { .. } => 3,
            Error::SingularWeights { .. } | Error::NoConvergence { .. } => 4,
            Error::DimensionMismatch { .. } | Error::Domain(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Ensemble(a) => commands::ensemble(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Communities(a) => commands::communities(a),
        Command::Consensus(a) => commands::consensus(a),
    };
    match result {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
