//! Benchmark reports.

use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::BenchError;

pub const CSV_HEADER: &str = "instance,n,m,method,objective,feasible,runtime_ms,seed,epsilon";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub method: String,
    pub objective: f64,
    pub feasible: bool,
    pub runtime_ms: u64,
    pub seed: u64,
    /// Relative error against the best-known value; `None` when the instance
    /// has no reference value.
    pub epsilon: Option<f64>,
}

impl ReportRow {
    fn order(&self, other: &Self) -> Ordering {
        (&self.instance, &self.method, self.seed).cmp(&(&other.instance, &other.method, other.seed))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMetadata {
    /// SHA-256 of the canonical JSON of the suite description, hex encoded.
    pub config_digest: String,
    /// RFC 3339 UTC time the run started; empty in deterministic mode.
    pub timestamp: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(BenchError::Usage(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

impl BenchReport {
    /// Builds a report with rows in (instance, method, seed) order.
    pub fn new(metadata: ReportMetadata, mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by(ReportRow::order);
        Self { metadata, rows }
    }

    pub fn emit(&self, format: ReportFormat) -> Result<String, BenchError> {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
        }
    }

    /// Rows only; the metadata has no place in the CSV layout.
    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let body = w.into_inner().map_err(|e| BenchError::Format(e.to_string()))?;
        let body = String::from_utf8(body).map_err(|e| BenchError::Format(e.to_string()))?;
        Ok(format!("{CSV_HEADER}\n{body}"))
    }

    pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>, BenchError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        if header.join(",") != CSV_HEADER {
            return Err(BenchError::Format(format!("unexpected report header {:?}", header.join(","))));
        }
        r.deserialize().map(|row| row.map_err(BenchError::from)).collect()
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        Ok(serde_json::from_str(text)?)
    }
}
