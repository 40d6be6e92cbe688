//! Machine-readable run reports.
//!
//! Reports are deterministic for a fixed input and seed once the timing
//! fields are stripped, and the schema is versioned so downstream
//! consumers can detect drift.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Wall-clock milliseconds per pipeline stage. Stages that did not run
/// stay at zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub parse_ms: f64,
    pub decompose_ms: f64,
    pub analyze_ms: f64,
    pub dpg_ms: f64,
    pub autom_ms: f64,
    pub interchange_ms: f64,
    pub breaking_ms: f64,
    pub grounding_ms: f64,
    pub solving_ms: f64,
}

impl StageTimings {
    /// Everything up to and including symmetry detection.
    pub fn detection_ms(&self) -> f64 {
        self.decompose_ms + self.analyze_ms + self.dpg_ms + self.autom_ms + self.interchange_ms
    }
}

/// One closed block of argument positions and what was found there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    /// Positions as `Sym|i` strings, in block order.
    pub positions: Vec<String>,
    /// Whether some symbol holds two or more positions in the block,
    /// which is when the permutation graph is needed.
    pub needs_graph: bool,
    /// Interchangeable cells with at least two elements, as names.
    pub interchangeable: Vec<Vec<String>>,
    /// Generators of the input-fixing group, in cycle notation.
    pub generators: Vec<String>,
    /// Whether the generator search ran to completion.
    pub generators_complete: bool,
    /// Brute-force confirmation: None when skipped or out of budget.
    pub oracle_checked: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnfReport {
    pub catalog_atoms: usize,
    pub vars: u32,
    pub clauses: usize,
    pub breaking_clauses: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// "sat", "unsat", or "budget".
    pub status: String,
    /// "embedded" or the external command.
    pub engine: String,
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance: String,
    /// Decomposed problem in source syntax; analysis runs report it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<String>,
    pub blocks: Vec<BlockReport>,
    pub cnf: Option<CnfReport>,
    pub solve: Option<SolveReport>,
    pub timings: StageTimings,
}

impl RunReport {
    pub fn new(instance: &str) -> RunReport {
        RunReport {
            schema_version: SCHEMA_VERSION,
            instance: instance.to_string(),
            decomposition: None,
            blocks: Vec::new(),
            cnf: None,
            solve: None,
            timings: StageTimings::default(),
        }
    }

    /// Zero the timing fields, leaving only the deterministic content.
    pub fn strip_timings(&mut self) {
        self.timings = StageTimings::default();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
