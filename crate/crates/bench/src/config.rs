//! JSON config file. Keys mirror the command-line flags; a flag given on
//! the command line wins over the file.

use std::path::{Path, PathBuf};

use gdfl_core::ProblemKind;
use serde::{Deserialize, Serialize};

use crate::report::ReportFormat;
use crate::suite::Method;
use crate::BenchError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub problem: Option<ProblemKind>,
    pub input: Vec<PathBuf>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    /// Number of consecutive seeds starting at `seed`.
    pub seeds: Option<u64>,
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub lambda: Option<f64>,
    pub observe: Option<f64>,
    pub penalty: Option<f64>,
    pub polish: Option<bool>,
    pub format: Option<ReportFormat>,
    pub out: Option<PathBuf>,
    pub method: Vec<Method>,
    /// Number of generated graphs in a `bench` suite.
    pub graphs: Option<u64>,
    pub deterministic: Option<bool>,
    pub trace: Option<PathBuf>,
    pub adjacency: Option<PathBuf>,
    pub qubo: Option<PathBuf>,
}

impl Options {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::Usage(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| BenchError::Usage(format!("{}: {e}", path.display())))
    }

    /// Fills every unset field of `self` from `fallback`.
    pub fn or(self, fallback: Options) -> Options {
        fn list<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Options {
            problem: self.problem.or(fallback.problem),
            input: list(self.input, fallback.input),
            d: self.d.or(fallback.d),
            n: self.n.or(fallback.n),
            seed: self.seed.or(fallback.seed),
            seeds: self.seeds.or(fallback.seeds),
            epochs: self.epochs.or(fallback.epochs),
            lr: self.lr.or(fallback.lr),
            lambda: self.lambda.or(fallback.lambda),
            observe: self.observe.or(fallback.observe),
            penalty: self.penalty.or(fallback.penalty),
            polish: self.polish.or(fallback.polish),
            format: self.format.or(fallback.format),
            out: self.out.or(fallback.out),
            method: list(self.method, fallback.method),
            graphs: self.graphs.or(fallback.graphs),
            deterministic: self.deterministic.or(fallback.deterministic),
            trace: self.trace.or(fallback.trace),
            adjacency: self.adjacency.or(fallback.adjacency),
            qubo: self.qubo.or(fallback.qubo),
        }
    }

    /// The seeds `seed, seed + 1, …` (`seeds` of them, default one).
    pub fn seed_list(&self) -> Vec<u64> {
        let first = self.seed.unwrap_or(0);
        (0..self.seeds.unwrap_or(1)).map(|k| first + k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_mirrors_flag_names() {
        let o = Options::from_json(
            r#"{"problem": "mvc", "input": ["a.txt"], "seeds": 3, "polish": false,
                "format": "json", "method": ["dga+local-search"], "lambda": 0.5}"#,
        )
        .unwrap();
        assert_eq!(o.problem, Some(ProblemKind::Mvc));
        assert_eq!(o.seed_list(), [0, 1, 2]);
        assert_eq!(o.polish, Some(false));
        assert_eq!(o.format, Some(ReportFormat::Json));
        assert_eq!(o.method, [Method::DgaLocalSearch]);
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        assert!(matches!(Options::from_json(r#"{"epoch": 3}"#), Err(BenchError::Usage(_))));
    }

    #[test]
    fn command_line_wins() {
        let cli = Options {
            seed: Some(7),
            ..Options::default()
        };
        let file = Options {
            seed: Some(1),
            n: Some(10),
            ..Options::default()
        };
        let merged = cli.or(file);
        assert_eq!((merged.seed, merged.n), (Some(7), Some(10)));
    }
}
