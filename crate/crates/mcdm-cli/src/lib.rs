//! Command-line front end for the mcdm crate.
//!
//! Four subcommands cover the pipeline: `rank` scores candidates with
//! crisp or fuzzy TOPSIS, `weights` derives criterion weights from
//! pairwise judgments, `evaluate` compares ranking or label sources
//! against a reference, and `fuzzify` converts crisp inputs into
//! triangular fuzzy numbers.
//!
//! Exit codes: 0 on success, 1 for validation or configuration problems,
//! 2 for computation failures such as a fully degenerate decision. Every
//! error prints one line on standard error of the form
//! `mcdm: error[kind]: reason`.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "mcdm",
    version,
    about = "Multi-criteria candidate ranking and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank candidates with crisp or fuzzy TOPSIS
    Rank(RankArgs),
    /// Derive criterion weights from pairwise judgment matrices
    Weights(WeightsArgs),
    /// Compare ranking or label sources against a reference
    Evaluate(EvaluateArgs),
    /// Turn a crisp weight vector or score table into fuzzy numbers
    Fuzzify(FuzzifyArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration; explicit flags override its fields
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: $MCDM_RANK_OUT, then mcdm-out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Long-format score CSV (candidate_id,criterion,score,source,rater)
    #[arg(long, value_name = "PATH")]
    scores: Option<PathBuf>,
    /// Candidate profile CSV; scored candidates must appear in it
    #[arg(long, value_name = "PATH")]
    candidates: Option<PathBuf>,
    /// Weight vector JSON
    #[arg(long, value_name = "PATH")]
    weights: Option<PathBuf>,
    /// Pairwise judgment JSON; repeat the flag for several judges
    #[arg(long, value_name = "PATH")]
    pairwise: Vec<PathBuf>,
    /// Use the built-in preset: Skills 0.60, Experience 0.20,
    /// Education 0.15, About 0.05
    #[arg(long)]
    paper_weights: bool,
    /// Ranking mode
    #[arg(long, value_name = "crisp|fuzzy")]
    mode: Option<String>,
    /// Column normalization scheme
    #[arg(long, value_name = "vector|linear-max")]
    normalization: Option<String>,
    /// Symmetric weight fuzzification spread in [0, 1)
    #[arg(long, value_name = "FLOAT")]
    spread: Option<f64>,
    /// Comma-separated criterion order (default: order of appearance)
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    criteria: Option<Vec<String>>,
    /// Keep only scores from one source
    #[arg(long, value_name = "expert|model")]
    score_source: Option<String>,
}

#[derive(Debug, Args)]
struct WeightsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Pairwise judgment JSON; repeat the flag for several judges
    #[arg(long, value_name = "PATH")]
    pairwise: Vec<PathBuf>,
    /// Also fuzzify the derived weights with this spread
    #[arg(long, value_name = "FLOAT")]
    spread: Option<f64>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Named source as NAME=PATH; repeat for every source (at least two)
    #[arg(long = "input", value_name = "NAME=PATH")]
    inputs: Vec<String>,
    /// Name of the input that acts as the reference
    #[arg(long, value_name = "NAME")]
    reference: String,
    /// How many top reference candidates count as relevant
    /// (default: half, rounded up)
    #[arg(long, value_name = "N")]
    relevant_k: Option<usize>,
}

#[derive(Debug, Args)]
struct FuzzifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Score CSV to map through the linguistic binding
    #[arg(long, value_name = "PATH")]
    scores: Option<PathBuf>,
    /// Weight vector JSON to widen by the spread rule
    #[arg(long, value_name = "PATH")]
    weights: Option<PathBuf>,
    /// Symmetric spread in [0, 1) (default 0)
    #[arg(long, value_name = "FLOAT")]
    spread: Option<f64>,
    /// Comma-separated criterion order (default: order of appearance)
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    criteria: Option<Vec<String>>,
    /// Keep only scores from one source
    #[arg(long, value_name = "expert|model")]
    score_source: Option<String>,
}

/// Parses arguments, runs the chosen command and maps errors to exit
/// codes: 1 for validation problems, 2 for computation failures.
pub fn run<I, A>(args: I) -> ExitCode
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => return handle_clap_error(err),
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let computation = is_computation_error(&err);
            let kind = if computation { "computation" } else { "validation" };
            // The alternate form chains causes onto one line.
            eprintln!("mcdm: error[{kind}]: {err:#}");
            ExitCode::from(if computation { 2 } else { 1 })
        }
    }
}

fn is_computation_error(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause
            .downcast_ref::<mcdm::Error>()
            .is_some_and(mcdm::Error::is_computation)
    })
}

/// Help and version requests succeed on stdout; any other parse problem
/// becomes a one-line usage error, consistent with runtime errors.
fn handle_clap_error(err: clap::Error) -> ExitCode {
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            print!("{err}");
            ExitCode::SUCCESS
        }
        _ => {
            let rendered = err.to_string();
            let message = rendered
                .lines()
                .find(|line| !line.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim()
                .trim_start_matches("error: ");
            eprintln!("mcdm: error[usage]: {message}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rank(args) => {
            let overrides = Overrides {
                scores: args.scores,
                candidates: args.candidates,
                criteria: args.criteria,
                weights: args.weights,
                pairwise: args.pairwise,
                paper_weights: args.paper_weights,
                mode: args.mode,
                normalization: args.normalization,
                spread: args.spread,
                score_source: args.score_source,
                out: args.common.out,
                ..Overrides::default()
            };
            let config = RunConfig::resolve(args.common.config.as_deref(), &overrides)?;
            commands::cmd_rank(&config)?;
            Ok(())
        }
        Command::Weights(args) => {
            let overrides = Overrides {
                pairwise: args.pairwise,
                spread: args.spread,
                out: args.common.out,
                ..Overrides::default()
            };
            let config = RunConfig::resolve(args.common.config.as_deref(), &overrides)?;
            commands::cmd_weights(&config)?;
            Ok(())
        }
        Command::Evaluate(args) => {
            let overrides = Overrides {
                relevant_k: args.relevant_k,
                out: args.common.out,
                ..Overrides::default()
            };
            let config = RunConfig::resolve(args.common.config.as_deref(), &overrides)?;
            let inputs = parse_named_inputs(&args.inputs)?;
            commands::cmd_evaluate(&config, &inputs, &args.reference)?;
            Ok(())
        }
        Command::Fuzzify(args) => {
            let overrides = Overrides {
                scores: args.scores,
                weights: args.weights,
                spread: args.spread,
                criteria: args.criteria,
                score_source: args.score_source,
                out: args.common.out,
                ..Overrides::default()
            };
            let config = RunConfig::resolve(args.common.config.as_deref(), &overrides)?;
            commands::cmd_fuzzify(&config)
        }
    }
}

fn parse_named_inputs(raw: &[String]) -> Result<Vec<(String, PathBuf)>> {
    let mut inputs: Vec<(String, PathBuf)> = Vec::new();
    for item in raw {
        let Some((name, path)) = item.split_once('=') else {
            bail!("input {item:?} must look like NAME=PATH");
        };
        let (name, path) = (name.trim(), path.trim());
        if name.is_empty() || path.is_empty() {
            bail!("input {item:?} must look like NAME=PATH");
        }
        if inputs.iter().any(|(existing, _)| existing == name) {
            bail!("input name {name:?} is given twice");
        }
        inputs.push((name.to_string(), PathBuf::from(path)));
    }
    Ok(inputs)
}
