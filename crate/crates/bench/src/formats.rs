//! Text exports of intermediate artifacts.

use gdfl_core::gnn::TraceRow;
use gdfl_core::linkpred::SoftAdjacency;
use gdfl_core::pipeline::{PipelineConfig, PipelineResult, PREDICTED_EDGE_MIN_PROB};
use gdfl_core::ProblemKind;
use serde::{Deserialize, Serialize};

use crate::BenchError;

/// Loss trace as CSV `epoch,loss,best_loss`.
pub fn trace_csv(trace: &[TraceRow]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["epoch", "loss", "best_loss"])?;
    for row in trace {
        w.serialize((row.epoch, row.loss, row.best_loss))?;
    }
    finish(w)
}

/// Soft adjacency as CSV `i,j,prob`, one line per pair `i < j` whose
/// probability is at least the pipeline's edge cut-off.
pub fn soft_adjacency_csv(soft: &SoftAdjacency) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "j", "prob"])?;
    for (i, j, prob) in soft.entries_at_least(PREDICTED_EDGE_MIN_PROB) {
        w.serialize((i, j, prob))?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, BenchError> {
    let bytes = w.into_inner().map_err(|e| BenchError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| BenchError::Format(e.to_string()))
}

/// Serialized form of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRecord {
    pub problem: ProblemKind,
    pub n: usize,
    pub m: usize,
    pub observe_fraction: f64,
    pub lambda: f64,
    pub seed: u64,
    pub objective_true: f64,
    pub objective_predicted: f64,
    pub feasible_true: bool,
    pub runtime_ms: Option<u64>,
    pub h_qubo: f64,
    pub l_obj: f64,
    pub combined_loss: f64,
}

impl PipelineRecord {
    pub fn new(cfg: &PipelineConfig, r: &PipelineResult) -> Self {
        Self {
            problem: cfg.kind,
            n: r.n,
            m: r.m,
            observe_fraction: cfg.observe_fraction,
            lambda: cfg.lambda,
            seed: r.seed,
            objective_true: r.objective_true,
            objective_predicted: r.objective_predicted,
            feasible_true: r.feasible_true,
            runtime_ms: r.runtime_ms,
            h_qubo: r.h_qubo,
            l_obj: r.l_obj,
            combined_loss: r.combined_loss,
        }
    }

    pub fn to_json(&self) -> Result<String, BenchError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
