//! Benchmark harness pieces behind the `jobshop-bench` binary.
//!
//! The binary itself only parses flags and dispatches; everything it does is
//! exposed here so tests can drive batches, aggregate relative errors, and
//! render reports without spawning a process.

pub mod harness;
pub mod report;

pub use harness::{load_bounds, load_instance, read_instance_list, run_batch, BatchSettings, CliError, InputFormat};
pub use report::{
    compute_mre, group_label, relative_error, summarize, Emit, GroupRow, MreError, ReAggregation,
    RunRecord, Summary, CSV_HEADER,
};
