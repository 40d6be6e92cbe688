//! Command-line pipeline for local domain symmetry detection and
//! breaking: instance generators, run orchestration, reporting, and
//! the external-solver handoff.

pub mod external;
pub mod families;
pub mod pipeline;
pub mod report;
pub mod sample;

pub use families::{color_cycle, generate_pigeonhole};
pub use pipeline::{
    block_needs_graph, reorder_problem, run_pipeline, run_pipeline_on, verify_claim, BlockData,
    BreakMode, Options, PipelineError, PipelineOutput, Stage, VerifyReport,
};
pub use report::{BlockReport, CnfReport, RunReport, SolveReport, StageTimings, SCHEMA_VERSION};
