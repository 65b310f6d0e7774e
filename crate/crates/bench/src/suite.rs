//! Benchmark suites: which instances, which methods, which seeds.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use gdfl_core::baselines::{dga, one_flip_local_search};
use gdfl_core::gnn::{self, TrainConfig};
use gdfl_core::graph::{generate_d_regular, generate_erdos_renyi};
use gdfl_core::metrics::{best_known, relative_error};
use gdfl_core::pipeline::{end_to_end_solve, PipelineConfig};
use gdfl_core::qubo::{brute_force_optimum, is_feasible, objective, DEFAULT_PENALTY};
use gdfl_core::{BinaryAssignment, Graph, ProblemKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::{BenchReport, ReportMetadata, ReportRow};
use crate::{io, BenchError, TOOL_VERSION};

/// Environment variable bounding the number of worker threads.
pub const THREADS_ENV: &str = "GDFL_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "gnn-solver")]
    GnnSolver,
    #[serde(rename = "dfl-pipeline")]
    DflPipeline,
    #[serde(rename = "dga")]
    Dga,
    #[serde(rename = "dga+local-search")]
    DgaLocalSearch,
    /// Exhaustive search; small instances only.
    #[serde(rename = "oracle")]
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::GnnSolver,
        Method::DflPipeline,
        Method::Dga,
        Method::DgaLocalSearch,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::GnnSolver => "gnn-solver",
            Method::DflPipeline => "dfl-pipeline",
            Method::Dga => "dga",
            Method::DgaLocalSearch => "dga+local-search",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::Usage(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceSource {
    /// Gset text file, optionally `.gz`.
    File { path: PathBuf },
    DRegular { n: usize, d: usize, seed: u64 },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    /// Unit-weight edge list given inline.
    Edges { n: usize, edges: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    pub source: InstanceSource,
}

impl InstanceSpec {
    pub fn file(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let name = instance_name(&path);
        Self {
            name,
            source: InstanceSource::File { path },
        }
    }

    pub fn d_regular(n: usize, d: usize, seed: u64) -> Self {
        Self {
            name: format!("reg{d}-n{n}-g{seed}"),
            source: InstanceSource::DRegular { n, d, seed },
        }
    }

    pub fn load(&self) -> Result<Graph, BenchError> {
        Ok(match &self.source {
            InstanceSource::File { path } => io::read_graph(path)?,
            InstanceSource::DRegular { n, d, seed } => generate_d_regular(*n, *d, *seed)?,
            InstanceSource::ErdosRenyi { n, p, seed } => generate_erdos_renyi(*n, *p, *seed)?,
            InstanceSource::Edges { n, edges } => Graph::unweighted(*n, edges.iter().copied())?,
        })
    }
}

/// Instance name from a file name: the stem with any `.gz` and a single
/// further extension removed (`data/G14.txt.gz` → `G14`).
pub fn instance_name(path: &std::path::Path) -> String {
    let mut name = path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    if let Some(stripped) = name.strip_suffix(".gz") {
        name = stripped.to_owned();
    }
    match name.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem.to_owned(),
        _ => name,
    }
}

/// Knobs shared by the learned methods. `None` keeps the size-based default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub lambda: f64,
    pub observe: f64,
    pub penalty: f64,
    pub polish: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            epochs: None,
            lr: None,
            lambda: 1.0,
            observe: 0.8,
            penalty: DEFAULT_PENALTY,
            polish: true,
        }
    }
}

impl SolverSettings {
    pub fn train_config(&self, n: usize, seed: u64) -> TrainConfig {
        let mut cfg = TrainConfig::for_nodes(n).with_seed(seed);
        if let Some(epochs) = self.epochs {
            cfg.max_epochs = epochs;
        }
        if let Some(lr) = self.lr {
            cfg.learning_rate = lr;
        }
        cfg
    }

    pub fn pipeline_config(&self, kind: ProblemKind, n: usize, seed: u64) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(kind, n, seed);
        cfg.observe_fraction = self.observe;
        cfg.lambda = self.lambda;
        cfg.penalty = self.penalty;
        cfg.polish = self.polish;
        cfg.solver_cfg = self.train_config(n, seed);
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub problem: ProblemKind,
    pub instances: Vec<InstanceSpec>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub settings: SolverSettings,
    /// Blank timestamps and zero runtimes so repeated runs are byte-identical.
    #[serde(default)]
    pub deterministic: bool,
}

impl SuiteSpec {
    pub fn new(problem: ProblemKind) -> Self {
        Self {
            problem,
            instances: Vec::new(),
            methods: Vec::new(),
            seeds: Vec::new(),
            settings: SolverSettings::default(),
            deterministic: false,
        }
    }

    /// SHA-256 over the canonical JSON encoding, hex encoded.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("suite specs always serialize");
        hex::encode(Sha256::digest(&json))
    }

    fn validate(&self) -> Result<(), BenchError> {
        let mut names: Vec<&str> = self.instances.iter().map(|i| i.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(BenchError::Usage(format!("duplicate instance name {:?}", w[0])));
        }
        Ok(())
    }
}

/// Worker pool sized by `GDFL_THREADS` when set, else rayon's default.
pub fn thread_pool() -> Result<rayon::ThreadPool, BenchError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| BenchError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| BenchError::Usage(e.to_string()))
}

/// Runs every (instance, method, seed) combination. Rows run in parallel;
/// each row depends only on its own seed, so values do not depend on the
/// thread count.
pub fn run_suite(spec: &SuiteSpec) -> Result<BenchReport, BenchError> {
    spec.validate()?;
    let timestamp = if spec.deterministic {
        String::new()
    } else {
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    };
    let graphs = spec
        .instances
        .iter()
        .map(InstanceSpec::load)
        .collect::<Result<Vec<_>, _>>()?;

    let jobs: Vec<(usize, Method, u64)> = (0..graphs.len())
        .flat_map(|i| spec.methods.iter().flat_map(move |&m| spec.seeds.iter().map(move |&s| (i, m, s))))
        .collect();
    let rows = thread_pool()?.install(|| {
        jobs.par_iter()
            .map(|&(i, method, seed)| run_row(spec, &spec.instances[i].name, &graphs[i], method, seed))
            .collect::<Vec<_>>()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let metadata = ReportMetadata {
        config_digest: spec.digest(),
        timestamp,
        tool_version: TOOL_VERSION.to_owned(),
    };
    Ok(BenchReport::new(metadata, rows))
}

/// Runs one method on one graph and returns its decision.
pub fn run_method(
    kind: ProblemKind,
    g: &Graph,
    method: Method,
    seed: u64,
    settings: &SolverSettings,
) -> Result<BinaryAssignment, BenchError> {
    Ok(match method {
        Method::GnnSolver => {
            let cfg = settings.train_config(g.n(), seed);
            gnn::solve(kind, g, &cfg, settings.penalty, settings.polish)?.assignment
        }
        Method::DflPipeline => end_to_end_solve(g, &settings.pipeline_config(kind, g.n(), seed))?.assignment,
        Method::Dga => dga(kind, g),
        Method::DgaLocalSearch => one_flip_local_search(kind, g, &dga(kind, g))?,
        Method::Oracle => brute_force_optimum(kind, g)?.0,
    })
}

fn run_row(spec: &SuiteSpec, name: &str, g: &Graph, method: Method, seed: u64) -> Result<ReportRow, BenchError> {
    let kind = spec.problem;
    let start = Instant::now();
    let x = run_method(kind, g, method, seed, &spec.settings)?;
    let runtime_ms = if spec.deterministic {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    let value = objective(kind, g, &x)?;
    let epsilon = match (kind, best_known(name)) {
        (ProblemKind::MaxCut, Some(reference)) => Some(relative_error(value, reference.bls, kind.sense())?),
        _ => None,
    };
    Ok(ReportRow {
        instance: name.to_owned(),
        n: g.n(),
        m: g.m(),
        method: method.name().to_owned(),
        objective: value,
        feasible: is_feasible(kind, g, &x)?,
        runtime_ms,
        seed,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn c4() -> InstanceSpec {
        InstanceSpec {
            name: "C4".into(),
            source: InstanceSource::Edges {
                n: 4,
                edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
            },
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!("greedy".parse::<Method>().is_err());
    }

    #[test]
    fn instance_names_drop_extensions() {
        assert_eq!(instance_name(Path::new("data/G14")), "G14");
        assert_eq!(instance_name(Path::new("data/G14.txt")), "G14");
        assert_eq!(instance_name(Path::new("data/G14.gz")), "G14");
        assert_eq!(instance_name(Path::new("/x/G14.txt.gz")), "G14");
    }

    #[test]
    fn c4_oracle_and_dga_both_cut_four() {
        let mut spec = SuiteSpec::new(ProblemKind::MaxCut);
        spec.instances.push(c4());
        spec.methods = vec![Method::Oracle, Method::Dga];
        spec.seeds = vec![0];
        let r = run_suite(&spec).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| row.objective == 4.0 && row.feasible && row.epsilon.is_none()));
        assert_eq!(r.rows[0].method, "dga");
    }

    #[test]
    fn empty_suite_has_metadata_and_no_rows() {
        let r = run_suite(&SuiteSpec::new(ProblemKind::Mis)).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.metadata.config_digest.len(), 64);
        assert!(!r.metadata.timestamp.is_empty());
        assert_eq!(r.metadata.tool_version, TOOL_VERSION);
    }

    #[test]
    fn missing_instance_file_is_named() {
        let mut spec = SuiteSpec::new(ProblemKind::MaxCut);
        spec.instances.push(InstanceSpec::file("/no/such/G14"));
        spec.methods = vec![Method::Dga];
        spec.seeds = vec![0];
        let err = run_suite(&spec).unwrap_err();
        assert!(err.to_string().contains("/no/such/G14"), "{err}");
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut spec = SuiteSpec::new(ProblemKind::MaxCut);
        spec.instances = vec![c4(), c4()];
        assert!(matches!(run_suite(&spec), Err(BenchError::Usage(_))));
    }

    #[test]
    fn digest_tracks_the_spec() {
        let a = SuiteSpec::new(ProblemKind::MaxCut);
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.seeds.push(1);
        assert_ne!(a.digest(), b.digest());
    }
}
