//! Complete selections (one processing order per machine) and their
//! evaluation as longest paths on the implied precedence graph.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{Instance, OpId};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("machine orders form a cycle through operation {op}")]
pub struct CycleError {
    pub op: OpId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolutionError {
    #[error("expected {expected} machine sequences, found {found}")]
    WrongMachineCount { expected: usize, found: usize },
    #[error("machine {machine}: expected {expected} operations, found {found}")]
    WrongLength {
        machine: usize,
        expected: usize,
        found: usize,
    },
    #[error("operation {op} does not belong on machine {machine}")]
    WrongMachine { op: OpId, machine: usize },
    #[error("operation {op} appears more than once")]
    Duplicate { op: OpId },
}

/// One total processing order per machine. Together with the job routes this
/// fixes the whole precedence graph; it is feasible iff that graph is acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    seqs: Vec<Vec<OpId>>,
    pos: Vec<usize>,
}

impl Solution {
    pub fn from_sequences(
        instance: &Instance,
        seqs: Vec<Vec<OpId>>,
    ) -> Result<Self, SolutionError> {
        if seqs.len() != instance.num_machines() {
            return Err(SolutionError::WrongMachineCount {
                expected: instance.num_machines(),
                found: seqs.len(),
            });
        }
        let mut pos = vec![usize::MAX; instance.num_ops()];
        for (machine, seq) in seqs.iter().enumerate() {
            let expected = instance.ops_on_machine(machine).len();
            if seq.len() != expected {
                return Err(SolutionError::WrongLength {
                    machine,
                    expected,
                    found: seq.len(),
                });
            }
            for (index, &op) in seq.iter().enumerate() {
                if op >= instance.num_ops() || instance.op_machine(op) != machine {
                    return Err(SolutionError::WrongMachine { op, machine });
                }
                if pos[op] != usize::MAX {
                    return Err(SolutionError::Duplicate { op });
                }
                pos[op] = index;
            }
        }
        Ok(Solution { seqs, pos })
    }

    pub fn sequences(&self) -> &[Vec<OpId>] {
        &self.seqs
    }

    pub fn seq(&self, machine: usize) -> &[OpId] {
        &self.seqs[machine]
    }

    /// Position of `op` within its machine's sequence.
    pub fn pos_of(&self, op: OpId) -> usize {
        self.pos[op]
    }

    pub fn machine_pred(&self, instance: &Instance, op: OpId) -> Option<OpId> {
        let index = self.pos[op];
        (index > 0).then(|| self.seqs[instance.op_machine(op)][index - 1])
    }

    pub fn machine_succ(&self, instance: &Instance, op: OpId) -> Option<OpId> {
        let seq = &self.seqs[instance.op_machine(op)];
        seq.get(self.pos[op] + 1).copied()
    }

    pub(crate) fn replace_seq(&mut self, machine: usize, seq: Vec<OpId>) {
        for (index, &op) in seq.iter().enumerate() {
            self.pos[op] = index;
        }
        self.seqs[machine] = seq;
    }
}

/// Longest-path data for a feasible solution: `head(o)` is the earliest start
/// `L(0,o)`, `tail(o)` the longest path from `o` to the finish including
/// `o`'s own duration, so `head + tail = makespan` exactly on critical
/// operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleData {
    heads: Vec<u32>,
    tails: Vec<u32>,
    makespan: u32,
    topo: Vec<OpId>,
}

impl ScheduleData {
    pub fn head(&self, op: OpId) -> u32 {
        self.heads[op]
    }

    pub fn tail(&self, op: OpId) -> u32 {
        self.tails[op]
    }

    pub fn makespan(&self) -> u32 {
        self.makespan
    }

    pub fn topo_order(&self) -> &[OpId] {
        &self.topo
    }

    pub fn is_critical(&self, op: OpId) -> bool {
        self.heads[op] + self.tails[op] == self.makespan
    }
}

/// A maximal run of machine-adjacent operations on one critical path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalBlock {
    pub machine: usize,
    pub ops: Vec<OpId>,
}

impl CriticalBlock {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn first(&self) -> OpId {
        self.ops[0]
    }

    pub fn last(&self) -> OpId {
        *self.ops.last().unwrap()
    }
}

/// Forward and backward longest-path passes over a topological order of the
/// precedence graph. Returns `CycleError` naming an operation on a cycle when
/// the selection is infeasible.
pub fn evaluate(instance: &Instance, solution: &Solution) -> Result<ScheduleData, CycleError> {
    let n = instance.num_ops();
    let mut indegree = vec![0u8; n];
    for op in 0..n {
        if instance.job_pred(op).is_some() {
            indegree[op] += 1;
        }
        if solution.machine_pred(instance, op).is_some() {
            indegree[op] += 1;
        }
    }

    let mut queue: VecDeque<OpId> = (0..n).filter(|&op| indegree[op] == 0).collect();
    let mut heads = vec![0u32; n];
    let mut topo = Vec::with_capacity(n);
    while let Some(op) = queue.pop_front() {
        topo.push(op);
        let finish = heads[op] + instance.op_duration(op);
        let mut relax = |succ: OpId, queue: &mut VecDeque<OpId>| {
            heads[succ] = heads[succ].max(finish);
            indegree[succ] -= 1;
            if indegree[succ] == 0 {
                queue.push_back(succ);
            }
        };
        if let Some(js) = instance.job_succ(op) {
            relax(js, &mut queue);
        }
        if let Some(ms) = solution.machine_succ(instance, op) {
            relax(ms, &mut queue);
        }
    }

    if topo.len() < n {
        return Err(CycleError {
            op: find_cycle_op(instance, solution, &indegree),
        });
    }

    let mut tails = vec![0u32; n];
    let mut makespan = 0;
    for &op in topo.iter().rev() {
        let js_tail = instance.job_succ(op).map_or(0, |js| tails[js]);
        let ms_tail = solution
            .machine_succ(instance, op)
            .map_or(0, |ms| tails[ms]);
        tails[op] = instance.op_duration(op) + js_tail.max(ms_tail);
        makespan = makespan.max(heads[op] + tails[op]);
    }

    Ok(ScheduleData {
        heads,
        tails,
        makespan,
        topo,
    })
}

/// Walk unprocessed predecessors until one repeats; that operation is on a
/// cycle. Every unprocessed operation has an unprocessed predecessor, so the
/// walk cannot escape.
fn find_cycle_op(instance: &Instance, solution: &Solution, indegree: &[u8]) -> OpId {
    let start = indegree
        .iter()
        .position(|&d| d > 0)
        .expect("a cycle leaves operations with positive indegree");
    let mut visited = vec![false; instance.num_ops()];
    let mut current = start;
    loop {
        if visited[current] {
            return current;
        }
        visited[current] = true;
        let jp = instance.job_pred(current).filter(|&p| indegree[p] > 0);
        let mp = solution
            .machine_pred(instance, current)
            .filter(|&p| indegree[p] > 0);
        current = mp.or(jp).expect("unprocessed operation has an unprocessed predecessor");
    }
}

/// One maximal critical path, from the earliest critical operation to a
/// makespan-achieving one. Backtracking starts at the lowest-id operation
/// finishing at the makespan and prefers machine predecessors on ties.
pub fn critical_path(
    instance: &Instance,
    solution: &Solution,
    data: &ScheduleData,
) -> Vec<OpId> {
    let end = (0..instance.num_ops())
        .find(|&op| data.head(op) + instance.op_duration(op) == data.makespan())
        .expect("some operation finishes at the makespan");
    let mut path = vec![end];
    let mut current = end;
    loop {
        let start = data.head(current);
        let tight = |op: OpId| data.head(op) + instance.op_duration(op) == start;
        let mp = solution.machine_pred(instance, current).filter(|&p| tight(p));
        let jp = instance.job_pred(current).filter(|&p| tight(p));
        match mp.or(jp) {
            Some(pred) => {
                path.push(pred);
                current = pred;
            }
            None => break,
        }
    }
    path.reverse();
    path
}

/// Split a critical path into maximal runs of machine-adjacent operations, in
/// path order.
pub fn critical_blocks(
    instance: &Instance,
    solution: &Solution,
    path: &[OpId],
) -> Vec<CriticalBlock> {
    let mut blocks: Vec<CriticalBlock> = Vec::new();
    for &op in path {
        let machine = instance.op_machine(op);
        let extends = blocks.last().is_some_and(|block| {
            block.machine == machine && solution.pos_of(op) == solution.pos_of(block.last()) + 1
        });
        if extends {
            blocks.last_mut().unwrap().ops.push(op);
        } else {
            blocks.push(CriticalBlock {
                machine,
                ops: vec![op],
            });
        }
    }
    blocks
}

/// Deterministic per-operation listing: one "machine op start end" row per
/// operation, sorted by machine then start, critical operations flagged.
pub fn gantt_export(instance: &Instance, solution: &Solution, data: &ScheduleData) -> String {
    let mut out = String::new();
    for machine in 0..instance.num_machines() {
        for &op in solution.seq(machine) {
            let start = data.head(op);
            let end = start + instance.op_duration(op);
            let _ = write!(
                out,
                "{} {} {} {}",
                instance.machine_label(machine),
                instance.op_label(op),
                start,
                end
            );
            if data.is_critical(op) {
                out.push_str(" critical");
            }
            out.push('\n');
        }
    }
    out
}
