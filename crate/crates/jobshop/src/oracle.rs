//! Independent cross-checks: a relaxation-based schedule evaluation and an
//! exhaustive optimum search for tiny instances.

use thiserror::Error;

use crate::instance::{Instance, OpId};
use crate::schedule::{CycleError, Solution};

/// Default operation-count limit for [`brute_force_optimum`].
pub const ORACLE_OPS_LIMIT: usize = 12;

/// Error returned when an instance is too large for exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{ops} operations exceed the exhaustive search limit of {limit}")]
pub struct TooLarge {
    pub ops: usize,
    pub limit: usize,
}

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimal_makespan: u32,
    /// Number of complete active schedules reached by the search.
    pub explored: u64,
}

/// Evaluates a solution by iterated relaxation instead of a topological
/// sweep, as a structurally independent check on the main evaluation. A
/// cycle is detected when the arc-count distances fail to stabilize.
pub fn reference_evaluate(instance: &Instance, solution: &Solution) -> Result<u32, CycleError> {
    let n = instance.num_ops();
    if n == 0 {
        return Ok(0);
    }
    // First relax unit arc weights; depths keep growing iff there is a cycle.
    let mut depth = vec![0u32; n];
    let mut stable = false;
    for _ in 0..=n {
        let mut changed = false;
        for op in 0..n {
            let mut d = 0;
            if let Some(jp) = instance.job_pred(op) {
                d = d.max(depth[jp] + 1);
            }
            if let Some(mp) = solution.machine_pred(instance, op) {
                d = d.max(depth[mp] + 1);
            }
            if d > depth[op] {
                depth[op] = d;
                changed = true;
            }
        }
        if !changed {
            stable = true;
            break;
        }
    }
    if !stable {
        return Err(CycleError { op: op_on_cycle(instance, solution, &depth) });
    }
    // The graph is acyclic, so relaxing the real durations converges.
    let mut start = vec![0u32; n];
    loop {
        let mut changed = false;
        for op in 0..n {
            let mut ready = 0;
            if let Some(jp) = instance.job_pred(op) {
                ready = ready.max(start[jp] + instance.op_duration(jp));
            }
            if let Some(mp) = solution.machine_pred(instance, op) {
                ready = ready.max(start[mp] + instance.op_duration(mp));
            }
            if ready > start[op] {
                start[op] = ready;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((0..n)
        .map(|op| start[op] + instance.op_duration(op))
        .max()
        .unwrap_or(0))
}

/// Walks binding predecessors from a maximal-depth operation until one
/// repeats; the repeated operation lies on a precedence cycle.
fn op_on_cycle(instance: &Instance, solution: &Solution, depth: &[u32]) -> OpId {
    let start = (0..depth.len()).max_by_key(|&op| depth[op]).unwrap();
    let mut visited = vec![false; depth.len()];
    let mut cur = start;
    loop {
        if visited[cur] {
            return cur;
        }
        visited[cur] = true;
        let jp = instance.job_pred(cur);
        let mp = solution.machine_pred(instance, cur);
        cur = match (jp, mp) {
            (Some(a), Some(b)) => {
                if depth[a] >= depth[b] {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return cur,
        };
    }
}

/// Finds the optimal makespan of a tiny instance by exhaustively enumerating
/// active schedules: at every step the machine with the earliest possible
/// completion is chosen and each operation on it that could start before
/// that completion is tried in turn. `explored` counts the complete active
/// schedules enumerated.
pub fn brute_force_optimum(instance: &Instance, limit: usize) -> Result<OracleResult, TooLarge> {
    let ops = instance.num_ops();
    if ops > limit {
        return Err(TooLarge { ops, limit });
    }
    if ops == 0 {
        return Ok(OracleResult { optimal_makespan: 0, explored: 1 });
    }
    let mut state = SearchState {
        instance,
        next_pos: vec![0; instance.num_jobs()],
        job_ready: vec![0; instance.num_jobs()],
        machine_ready: vec![0; instance.num_machines()],
        best: u32::MAX,
        explored: 0,
    };
    dfs(&mut state, 0);
    Ok(OracleResult { optimal_makespan: state.best, explored: state.explored })
}

struct SearchState<'a> {
    instance: &'a Instance,
    next_pos: Vec<usize>,
    job_ready: Vec<u32>,
    machine_ready: Vec<u32>,
    best: u32,
    explored: u64,
}

fn dfs(st: &mut SearchState<'_>, scheduled: usize) {
    let instance = st.instance;
    if scheduled == instance.num_ops() {
        let makespan = st.job_ready.iter().copied().max().unwrap_or(0);
        if makespan < st.best {
            st.best = makespan;
        }
        st.explored += 1;
        return;
    }
    // Earliest possible completion over all ready operations, and the machine
    // attaining it (lowest index on ties).
    let mut best_completion = u32::MAX;
    let mut chosen_machine = usize::MAX;
    for j in 0..instance.num_jobs() {
        if st.next_pos[j] >= instance.job_len(j) {
            continue;
        }
        let op = instance.op_id(j, st.next_pos[j]);
        let machine = instance.op_machine(op);
        let start = st.job_ready[j].max(st.machine_ready[machine]);
        let completion = start + instance.op_duration(op);
        if completion < best_completion
            || (completion == best_completion && machine < chosen_machine)
        {
            best_completion = completion;
            chosen_machine = machine;
        }
    }
    for j in 0..instance.num_jobs() {
        if st.next_pos[j] >= instance.job_len(j) {
            continue;
        }
        let op = instance.op_id(j, st.next_pos[j]);
        let machine = instance.op_machine(op);
        if machine != chosen_machine {
            continue;
        }
        let duration = instance.op_duration(op);
        let start = st.job_ready[j].max(st.machine_ready[machine]);
        // Scheduling anything that starts at or after the chosen completion
        // would leave an avoidable hole, so those branches are not active.
        if start >= best_completion && start + duration != best_completion {
            continue;
        }
        let finish = start + duration;
        let saved = (st.job_ready[j], st.machine_ready[machine]);
        st.next_pos[j] += 1;
        st.job_ready[j] = finish;
        st.machine_ready[machine] = finish;
        dfs(st, scheduled + 1);
        st.next_pos[j] -= 1;
        st.job_ready[j] = saved.0;
        st.machine_ready[machine] = saved.1;
    }
}
