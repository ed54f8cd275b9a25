//! Machine-readable run reports.
//!
//! A report is a single JSON document. Identical inputs and seed produce
//! byte-identical reports; wall time is therefore kept out of the serialized
//! form and surfaced on stderr instead.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub kernel: String,
    pub constraint: String,
    pub k: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmSummary {
    pub name: String,
    pub p: Option<usize>,
    pub ell: Option<u64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveSummary {
    pub dispersion: f64,
    pub submodular: Option<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counters {
    pub oracle_calls: u64,
    pub distance_evals: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub opt_value: f64,
    pub achieved_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub instance: InstanceSummary,
    pub algorithm: AlgorithmSummary,
    pub solution_ids: Vec<String>,
    pub solution_indices: Vec<usize>,
    pub objective: ObjectiveSummary,
    /// Lower-bound factor certified by the run parameters, when a guarantee
    /// applies.
    pub certified_bound: Option<f64>,
    pub counters: Counters,
    pub oracle_comparison: Option<OracleComparison>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub wall_ms: u64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
