//! Command-line front end: validation, oracle answers, protocol simulation,
//! differential comparison, network generation and round-count sweeps.

pub mod bench;
pub mod compare;
pub mod gen;
pub mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use colornet::engine::{EngineError, RunOptions};
use colornet::netmodel::{Color, ColoredNetwork};
use colornet::oracle;
use colornet::protocol::{default_max_rounds, run_protocol_with, Params, ProtocolError, Task};
use colornet::views::shared_arena;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "colornet", version, about = "Leader election and topology recognition in colored anonymous networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a network file parses and is a valid colored network.
    Validate { file: PathBuf },
    /// Print the quotient graph and the centralized answer.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        bound: Bound,
        #[command(flatten)]
        output: Output,
    },
    /// Run the distributed protocol and print every node's answer.
    Simulate(SimulateArgs),
    /// Run the protocol for both tasks and compare with the oracle.
    Compare {
        /// A network file, or a directory of network files.
        path: PathBuf,
        #[command(flatten)]
        bound: Bound,
        #[command(flatten)]
        output: Output,
    },
    /// Write a generated network.
    Gen {
        #[command(subcommand)]
        family: gen::Family,
        #[command(flatten)]
        output: Output,
    },
    /// Measure round counts over a network family.
    Bench(bench::BenchArgs),
}

/// An upper bound `k` on the size of color `alpha`.
#[derive(Clone, Copy, Debug, Args)]
pub struct Bound {
    /// Upper bound on the size of the distinguished color.
    #[arg(long)]
    pub k: Option<u32>,
    /// The distinguished color.
    #[arg(long)]
    pub alpha: Option<Color>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Le,
    Top,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Le => Task::LeaderElection,
            TaskArg::Top => Task::Topology,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct SimulateArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub alpha: Color,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Round limit; defaults to a safe envelope above the proven bound.
    #[arg(long)]
    pub max_rounds: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write a JSONL transcript of every round to this file.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Fail with exit code 3 if k is below the true size of alpha.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("round limit {max_rounds} reached with {unfinished} nodes still running")]
    RoundLimit { max_rounds: u32, unfinished: usize },
    #[error("k = {k} is below the size {actual} of color {alpha}")]
    KTooSmall { k: u32, alpha: Color, actual: usize },
    #[error("comparison failed: protocol and oracle disagree or a file could not be checked")]
    Mismatch,
    #[error(transparent)]
    Protocol(ProtocolError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::RoundLimit { .. } => 2,
            CliError::KTooSmall { .. } => 3,
            _ => 1,
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Engine(EngineError::RoundLimitExceeded {
                max_rounds,
                unfinished,
            }) => CliError::RoundLimit {
                max_rounds,
                unfinished: unfinished.len(),
            },
            other => CliError::Protocol(other),
        }
    }
}

pub fn read_network(path: &Path) -> Result<ColoredNetwork, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    ColoredNetwork::parse(&text).map_err(|e| CliError::Invalid {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn write_output(output: &Output, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

/// Runs one command, writing data to `stdout` and diagnostics to `stderr`,
/// and returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Validate { file } => {
            let net = read_network(&file)?;
            let _ = writeln!(
                stderr,
                "{}: valid, {} nodes, {} edges, {} colors",
                file.display(),
                net.node_count(),
                net.network.edge_count(),
                net.coloring.color_count()
            );
            Ok(0)
        }
        Command::Oracle { file, bound, output } => {
            let net = read_network(&file)?;
            let (k, alpha) = resolve_bound(&net, bound)?;
            let text = report::oracle_json(&net, k, alpha);
            write_output(&output, &text, stdout)?;
            Ok(0)
        }
        Command::Simulate(args) => simulate(args, stdout, stderr),
        Command::Compare { path, bound, output } => {
            let (text, ok) = compare::compare_path(&path, bound)?;
            write_output(&output, &text, stdout)?;
            if ok {
                Ok(0)
            } else {
                Err(CliError::Mismatch)
            }
        }
        Command::Gen { family, output } => {
            let net = gen::generate(&family)?;
            write_output(&output, &net.serialize(), stdout)?;
            Ok(0)
        }
        Command::Bench(args) => {
            let text = bench::run_bench(&args)?;
            write_output(&args.output, &text, stdout)?;
            Ok(0)
        }
    }
}

/// Fills in a missing `alpha` with 1 and a missing `k` with the size of
/// `alpha`.
pub fn resolve_bound(net: &ColoredNetwork, bound: Bound) -> Result<(u32, Color), CliError> {
    let alpha = bound.alpha.unwrap_or(1);
    let size = net.coloring.size_of(alpha);
    if size == 0 {
        return Err(CliError::Usage(format!("color {alpha} does not occur in the network")));
    }
    Ok((bound.k.unwrap_or(size as u32), alpha))
}

fn simulate(args: SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, CliError> {
    let net = read_network(&args.file)?;
    if !oracle::validate_k(&net.coloring, args.alpha, args.k) {
        let warning = CliError::KTooSmall {
            k: args.k,
            alpha: args.alpha,
            actual: net.coloring.size_of(args.alpha),
        };
        if args.strict {
            return Err(warning);
        }
        let _ = writeln!(stderr, "warning: {warning}; answers may be wrong");
    }
    let params = Params::new(args.k, args.alpha, args.task.into());
    let max_rounds = args
        .max_rounds
        .unwrap_or_else(|| default_max_rounds(args.k, net.node_count(), net.network.diameter()));
    let mut options = RunOptions::new(max_rounds);
    if args.transcript.is_some() {
        options = options.with_transcript();
    }
    let run = run_protocol_with(&net, params, &shared_arena(), options)?;
    if let (Some(path), Some(transcript)) = (&args.transcript, &run.transcript) {
        let io_error = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let file = fs::File::create(path).map_err(io_error)?;
        let mut writer = io::BufWriter::new(file);
        transcript.write_jsonl(&mut writer).map_err(io_error)?;
        writer.flush().map_err(io_error)?;
    }
    let text = match args.format {
        Format::Json => report::run_json(&params, &run),
        Format::Csv => report::run_csv(&run),
    };
    write_output(&args.output, &text, stdout)?;
    Ok(0)
}
