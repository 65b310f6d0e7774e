//! File formats, benchmark suites and reports on top of `gdfl-core`.
//!
//! - [`io`]: Gset graph files (optionally gzip-compressed).
//! - [`formats`]: loss traces, soft adjacencies, pipeline results, QUBO export.
//! - [`report`]: benchmark reports and their CSV/JSON emission.
//! - [`suite`]: suite descriptions and the parallel runner.
//! - [`config`]: the JSON config file shared with the command line.
//! - [`commands`]: the subcommands of the `gdfl` binary.

pub mod commands;
pub mod config;
mod error;
pub mod formats;
pub mod io;
pub mod report;
pub mod suite;

pub use error::{BenchError, ExitCode};
pub use report::{BenchReport, ReportFormat, ReportMetadata, ReportRow};
pub use suite::{run_suite, InstanceSource, InstanceSpec, Method, SuiteSpec};

/// Version string recorded in report metadata.
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
