//! Subcommand implementations behind the `gdfl` binary.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use gdfl_core::gnn;
use gdfl_core::graph::generate_d_regular;
use gdfl_core::pipeline::end_to_end_run;
use gdfl_core::qubo::build_qubo;
use gdfl_core::{Graph, ProblemKind};

use crate::config::Options;
use crate::formats::{soft_adjacency_csv, trace_csv, PipelineRecord};
use crate::io;
use crate::suite::{run_suite, InstanceSpec, Method, SolverSettings, SuiteSpec};
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Write a random d-regular graph.
    Gen,
    /// One method on one instance.
    Solve,
    /// End-to-end predict-then-optimize run.
    Dfl,
    /// Exhaustive optimum of a small instance.
    Oracle,
    /// A suite of instances × methods × seeds.
    Bench,
}

pub fn execute(command: Command, opts: &Options) -> Result<(), BenchError> {
    match command {
        Command::Gen => gen(opts),
        Command::Solve => {
            let method = match opts.method.as_slice() {
                [] => Method::GnnSolver,
                [m] => *m,
                _ => return Err(BenchError::Usage("solve takes a single --method".into())),
            };
            solve(opts, method)
        }
        Command::Oracle => solve(opts, Method::Oracle),
        Command::Dfl => dfl(opts),
        Command::Bench => bench(opts),
    }
}

fn problem(opts: &Options) -> Result<ProblemKind, BenchError> {
    opts.problem
        .ok_or_else(|| BenchError::Usage("--problem is required (maxcut, mis or mvc)".into()))
}

fn settings(opts: &Options) -> SolverSettings {
    let defaults = SolverSettings::default();
    SolverSettings {
        epochs: opts.epochs,
        lr: opts.lr,
        lambda: opts.lambda.unwrap_or(defaults.lambda),
        observe: opts.observe.unwrap_or(defaults.observe),
        penalty: opts.penalty.unwrap_or(defaults.penalty),
        polish: opts.polish.unwrap_or(defaults.polish),
    }
}

fn regular_size(opts: &Options) -> Result<(usize, usize), BenchError> {
    match (opts.n, opts.d) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(BenchError::Usage("need --input, or both --n and --d to generate a graph".into())),
    }
}

/// The single instance named by `--input`, or a generated d-regular graph.
fn single_instance(opts: &Options) -> Result<InstanceSpec, BenchError> {
    match opts.input.as_slice() {
        [path] => Ok(InstanceSpec::file(path)),
        [] => {
            let (n, d) = regular_size(opts)?;
            Ok(InstanceSpec::d_regular(n, d, opts.seed.unwrap_or(0)))
        }
        _ => Err(BenchError::Usage("this command takes a single --input".into())),
    }
}

fn emit(opts: &Options, text: &str) -> Result<(), BenchError> {
    match &opts.out {
        Some(path) => io::write_bytes(path, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| BenchError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn write_side_file(path: &Path, text: &str) -> Result<(), BenchError> {
    io::write_bytes(path, text.as_bytes())
}

fn gen(opts: &Options) -> Result<(), BenchError> {
    let (n, d) = regular_size(opts)?;
    let g = generate_d_regular(n, d, opts.seed.unwrap_or(0))?;
    emit(opts, &gdfl_core::graph::write_gset(&g))
}

fn solve(opts: &Options, method: Method) -> Result<(), BenchError> {
    let kind = problem(opts)?;
    let instance = single_instance(opts)?;
    let settings = settings(opts);
    let seed = opts.seed.unwrap_or(0);

    if opts.trace.is_some() || opts.qubo.is_some() {
        let g = instance.load()?;
        let q = build_qubo(kind, &g, settings.penalty)?;
        if let Some(path) = &opts.qubo {
            write_side_file(path, &q.to_coo_text())?;
        }
        if let Some(path) = &opts.trace {
            let outcome = gnn::train(&g, &q, &settings.train_config(g.n(), seed))?;
            write_side_file(path, &trace_csv(&outcome.trace)?)?;
        }
    }

    let spec = SuiteSpec {
        problem: kind,
        instances: vec![instance],
        methods: vec![method],
        seeds: opts.seed_list(),
        settings,
        deterministic: opts.deterministic.unwrap_or(false),
    };
    emit(opts, &run_suite(&spec)?.emit(opts.format.unwrap_or_default())?)
}

fn dfl(opts: &Options) -> Result<(), BenchError> {
    let kind = problem(opts)?;
    let g: Graph = single_instance(opts)?.load()?;
    let cfg = settings(opts).pipeline_config(kind, g.n(), opts.seed.unwrap_or(0));
    let start = Instant::now();
    let mut run = end_to_end_run(&g, &cfg)?;
    if !opts.deterministic.unwrap_or(false) {
        run.result.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    if let Some(path) = &opts.adjacency {
        write_side_file(path, &soft_adjacency_csv(&run.soft_adjacency)?)?;
    }
    if let Some(path) = &opts.trace {
        write_side_file(path, &trace_csv(&run.solver.trace)?)?;
    }
    emit(opts, &PipelineRecord::new(&cfg, &run.result).to_json()?)
}

fn bench(opts: &Options) -> Result<(), BenchError> {
    let kind = problem(opts)?;
    let mut instances: Vec<InstanceSpec> = opts.input.iter().map(InstanceSpec::file).collect();
    if opts.n.is_some() || opts.d.is_some() {
        let (n, d) = regular_size(opts)?;
        instances.extend((0..opts.graphs.unwrap_or(1)).map(|k| InstanceSpec::d_regular(n, d, k)));
    }
    let methods = if opts.method.is_empty() {
        vec![Method::Dga, Method::DgaLocalSearch, Method::GnnSolver]
    } else {
        opts.method.clone()
    };
    let spec = SuiteSpec {
        problem: kind,
        instances,
        methods,
        seeds: opts.seed_list(),
        settings: settings(opts),
        deterministic: opts.deterministic.unwrap_or(false),
    };
    emit(opts, &run_suite(&spec)?.emit(opts.format.unwrap_or_default())?)
}
