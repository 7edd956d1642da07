//! Job-shop scheduling toolkit: benchmark instance parsing, schedule
//! evaluation over machine orders, critical-block move neighborhoods with
//! feasibility gating and makespan estimation, and a tabu search driver.
//!
//! The shortest path through the API:
//!
//! ```
//! use jobshop::{builtin_example, NeighborhoodKind, SearchConfig};
//!
//! let instance = builtin_example();
//! let mut config = SearchConfig::new(NeighborhoodKind::N8, 42);
//! config.max_iters = 1_000;
//! let stats = jobshop::run(&instance, &config);
//! assert_eq!(stats.best_makespan, 10);
//! ```

pub mod instance;
pub mod move_eval;
pub mod neighborhood;
pub mod oracle;
pub mod schedule;
pub mod tabu;
pub mod testing;

#[cfg(test)]
pub(crate) mod testutil;

pub use instance::{
    builtin_example, parse_orlib, parse_taillard, simple_lower_bound, to_orlib, to_taillard,
    Instance, InstanceError, KnownBounds, OpId, ParseError,
};
pub use move_eval::{apply, estimate, segment_after, segment_before, ApplyError, MoveEstimate};
pub use neighborhood::{
    all_critical_runs, clip, generate, generate_with, prop1_holds, prop2_holds, GenOptions, Move,
    MoveKind, NeighborhoodKind, UnknownNeighborhood,
};
pub use oracle::{
    brute_force_optimum, reference_evaluate, OracleResult, TooLarge, ORACLE_OPS_LIMIT,
};
pub use schedule::{
    critical_blocks, critical_path, evaluate, gantt_export, CriticalBlock, CycleError,
    ScheduleData, Solution, SolutionError,
};
pub use tabu::{
    initial_solution, is_tabu, run, select_move, tenure_base, tenure_range, SearchConfig,
    SearchStats, StopReason, TabuEntry, TabuList,
};
