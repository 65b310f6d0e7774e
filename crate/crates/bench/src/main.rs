use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gdfl::commands::{self, Command};
use gdfl::config::Options;
use gdfl::suite::Method;
use gdfl::{BenchError, ReportFormat};
use gdfl_core::ProblemKind;

/// GNN solvers and decision-focused learning for MaxCut, MIS and MVC.
#[derive(Parser, Debug)]
#[command(name = "gdfl", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Generate a random d-regular graph in Gset format.
    Gen,
    /// Solve one instance with one method.
    Solve,
    /// Run the predict-then-optimize pipeline on one instance.
    Dfl,
    /// Exhaustive optimum of a small instance.
    Oracle,
    /// Run a suite of instances, methods and seeds.
    Bench,
}

#[derive(Args, Debug)]
struct Flags {
    /// JSON file with defaults for any of these flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    problem: Option<ProblemKind>,
    /// Gset graph file (`.gz` accepted); repeat for `bench`.
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, global = true)]
    seeds: Option<u64>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    lr: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Fraction of nodes observed by the pipeline.
    #[arg(long, global = true)]
    observe: Option<f64>,
    #[arg(long, global = true)]
    penalty: Option<f64>,
    #[arg(long, global = true, overrides_with = "no_polish")]
    polish: bool,
    #[arg(long, global = true, overrides_with = "polish")]
    no_polish: bool,
    #[arg(long, global = true)]
    format: Option<ReportFormat>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Method(s): gnn-solver, dfl-pipeline, dga, dga+local-search, oracle.
    #[arg(long, global = true, value_delimiter = ',')]
    method: Vec<Method>,
    /// Number of generated d-regular graphs in a bench suite.
    #[arg(long, global = true)]
    graphs: Option<u64>,
    /// Zero runtimes and blank timestamps for byte-identical reports.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Write the solver's loss trace as CSV.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Write the predicted soft adjacency as CSV (dfl).
    #[arg(long, global = true)]
    adjacency: Option<PathBuf>,
    /// Write the QUBO as a coordinate list (solve).
    #[arg(long, global = true)]
    qubo: Option<PathBuf>,
}

impl Flags {
    fn into_options(self) -> Result<Options, BenchError> {
        let file = match &self.config {
            Some(path) => Options::from_file(path)?,
            None => Options::default(),
        };
        let polish = match (self.polish, self.no_polish) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        };
        let cli = Options {
            problem: self.problem,
            input: self.input,
            d: self.d,
            n: self.n,
            seed: self.seed,
            seeds: self.seeds,
            epochs: self.epochs,
            lr: self.lr,
            lambda: self.lambda,
            observe: self.observe,
            penalty: self.penalty,
            polish,
            format: self.format,
            out: self.out,
            method: self.method,
            graphs: self.graphs,
            deterministic: self.deterministic.then_some(true),
            trace: self.trace,
            adjacency: self.adjacency,
            qubo: self.qubo,
        };
        Ok(cli.or(file))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(gdfl::ExitCode::Usage as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let command = match cli.command {
        Sub::Gen => Command::Gen,
        Sub::Solve => Command::Solve,
        Sub::Dfl => Command::Dfl,
        Sub::Oracle => Command::Oracle,
        Sub::Bench => Command::Bench,
    };
    let result = cli.flags.into_options().and_then(|opts| commands::execute(command, &opts));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gdfl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
