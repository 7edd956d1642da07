//! Move generation over critical blocks: end swaps, insertions of inner
//! operations at the block ends, reinsertions of the block ends inside, and
//! insertions that push operations past the block boundary.

use std::fmt;
use std::str::FromStr;

use crate::instance::{Instance, OpId};
use crate::schedule::{critical_blocks, critical_path, CriticalBlock, ScheduleData, Solution};

/// Direction of an insertion move on one machine sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    /// Insert `u` immediately after `v`: `(u, w.., v)` becomes `(w.., v, u)`.
    Forward,
    /// Insert `v` immediately before `u`: `(u, w.., v)` becomes `(v, u, w..)`.
    Backward,
}

/// A reordering of the span between operations `u` and `v` on one machine,
/// where `u` is sequenced strictly before `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub machine: usize,
    pub u: OpId,
    pub v: OpId,
}

/// Progressively larger move sets. Each kind contains every move of the
/// kinds before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NeighborhoodKind {
    /// Swaps of the first two and last two operations of each block.
    N5,
    /// N5 plus insertion of each inner operation at both block ends.
    N6,
    /// N6 plus reinsertion of the block ends at each inner position.
    N7,
    /// N7 plus insertions past the block boundary on the same machine.
    N8,
}

impl NeighborhoodKind {
    pub const ALL: [NeighborhoodKind; 4] = [
        NeighborhoodKind::N5,
        NeighborhoodKind::N6,
        NeighborhoodKind::N7,
        NeighborhoodKind::N8,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NeighborhoodKind::N5 => "N5",
            NeighborhoodKind::N6 => "N6",
            NeighborhoodKind::N7 => "N7",
            NeighborhoodKind::N8 => "N8",
        }
    }
}

impl fmt::Display for NeighborhoodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error returned when a neighborhood name is not one of N5, N6, N7, N8.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown neighborhood `{0}`, expected one of N5, N6, N7, N8")]
pub struct UnknownNeighborhood(pub String);

impl FromStr for NeighborhoodKind {
    type Err = UnknownNeighborhood;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "N5" => Ok(NeighborhoodKind::N5),
            "N6" => Ok(NeighborhoodKind::N6),
            "N7" => Ok(NeighborhoodKind::N7),
            "N8" => Ok(NeighborhoodKind::N8),
            _ => Err(UnknownNeighborhood(s.to_string())),
        }
    }
}

/// Feasibility gate for Forward moves: the tail of `v` must reach at least
/// the tail of `u`'s job successor minus that successor's duration (zero when
/// `u` is the last operation of its job). Moves that pass can never create a
/// precedence cycle.
pub fn prop1_holds(instance: &Instance, data: &ScheduleData, u: OpId, v: OpId) -> bool {
    match instance.job_succ(u) {
        None => true,
        Some(js) => data.tail(v) >= data.tail(js) - instance.op_duration(js),
    }
}

/// Feasibility gate for Backward moves: the head of `u` plus its duration
/// must reach at least the head of `v`'s job predecessor (zero when `v` is
/// the first operation of its job). Moves that pass can never create a
/// precedence cycle.
pub fn prop2_holds(instance: &Instance, data: &ScheduleData, u: OpId, v: OpId) -> bool {
    match instance.job_pred(v) {
        None => true,
        Some(jp) => data.head(u) + instance.op_duration(u) >= data.head(jp),
    }
}

/// Options controlling move generation.
#[derive(Debug, Clone, Copy, Default)]
pub struct GenOptions {
    /// When set, outside insertions only reach operations at most this many
    /// sequence positions beyond the block boundary.
    pub outside_window: Option<usize>,
    /// Build blocks from every critical path instead of a single canonical
    /// one.
    pub all_critical_paths: bool,
}

/// Generates the move set of `kind` for the blocks of one canonical critical
/// path, with default options.
pub fn generate(
    kind: NeighborhoodKind,
    instance: &Instance,
    solution: &Solution,
    data: &ScheduleData,
) -> Vec<Move> {
    generate_with(kind, instance, solution, data, &GenOptions::default())
}

/// Generates the move set of `kind`. Every candidate is gated by the
/// feasibility tests ([`prop1_holds`] for Forward, [`prop2_holds`] for
/// Backward), so applying any returned move keeps the selection acyclic.
/// The result is sorted by machine, span positions, and kind, with duplicate
/// moves removed.
pub fn generate_with(
    kind: NeighborhoodKind,
    instance: &Instance,
    solution: &Solution,
    data: &ScheduleData,
    options: &GenOptions,
) -> Vec<Move> {
    let blocks = if options.all_critical_paths {
        all_critical_runs(instance, solution, data)
    } else {
        let path = critical_path(instance, solution, data);
        critical_blocks(instance, solution, &path)
    };
    let mut moves = Vec::new();
    for block in &blocks {
        let machine = block.machine;
        let ops = &block.ops;
        let k = ops.len();
        if k == 2 {
            // The swaps of the first two and of the last two operations
            // coincide; emit the adjacent swap once.
            gated_push(&mut moves, instance, data, MoveKind::Forward, machine, ops[0], ops[1]);
        } else if k >= 3 {
            let first = ops[0];
            let last = ops[k - 1];
            gated_push(&mut moves, instance, data, MoveKind::Backward, machine, first, ops[1]);
            gated_push(&mut moves, instance, data, MoveKind::Forward, machine, ops[k - 2], last);
            if kind >= NeighborhoodKind::N6 {
                for &w in &ops[1..k - 1] {
                    gated_push(&mut moves, instance, data, MoveKind::Backward, machine, first, w);
                    gated_push(&mut moves, instance, data, MoveKind::Forward, machine, w, last);
                }
            }
            if kind >= NeighborhoodKind::N7 {
                for &w in &ops[1..k - 1] {
                    gated_push(&mut moves, instance, data, MoveKind::Forward, machine, first, w);
                    gated_push(&mut moves, instance, data, MoveKind::Backward, machine, w, last);
                }
            }
        }
        if kind == NeighborhoodKind::N8 {
            let seq = solution.seq(machine);
            let first_pos = solution.pos_of(ops[0]);
            let last_pos = solution.pos_of(ops[k - 1]);
            let after_end = match options.outside_window {
                Some(w) => seq.len().min(last_pos + 1 + w),
                None => seq.len(),
            };
            for &u in ops {
                for &v in &seq[last_pos + 1..after_end] {
                    gated_push(&mut moves, instance, data, MoveKind::Forward, machine, u, v);
                }
            }
            let before_start = match options.outside_window {
                Some(w) => first_pos.saturating_sub(w),
                None => 0,
            };
            for &u in &seq[before_start..first_pos] {
                for &v in ops {
                    gated_push(&mut moves, instance, data, MoveKind::Backward, machine, u, v);
                }
            }
        }
    }
    moves.sort_by_key(|m| (m.machine, solution.pos_of(m.u), solution.pos_of(m.v), m.kind));
    moves.dedup();
    moves
}

fn gated_push(
    moves: &mut Vec<Move>,
    instance: &Instance,
    data: &ScheduleData,
    kind: MoveKind,
    machine: usize,
    u: OpId,
    v: OpId,
) {
    debug_assert_ne!(u, v);
    let feasible = match kind {
        MoveKind::Forward => prop1_holds(instance, data, u, v),
        MoveKind::Backward => prop2_holds(instance, data, u, v),
    };
    if feasible {
        moves.push(Move { kind, machine, u, v });
    }
}

/// Maximal runs of machine-adjacent critical operations in which every
/// operation starts exactly when its predecessor in the run finishes. Every
/// such run is a block of some critical path, so together the runs cover the
/// blocks of every critical path.
pub fn all_critical_runs(
    instance: &Instance,
    solution: &Solution,
    data: &ScheduleData,
) -> Vec<CriticalBlock> {
    let mut runs = Vec::new();
    for machine in 0..instance.num_machines() {
        let mut current: Vec<OpId> = Vec::new();
        for &op in solution.seq(machine) {
            if data.is_critical(op) {
                if let Some(&prev) = current.last() {
                    if data.head(op) == data.head(prev) + instance.op_duration(prev) {
                        current.push(op);
                        continue;
                    }
                    runs.push(CriticalBlock { machine, ops: std::mem::take(&mut current) });
                }
                current.push(op);
            } else if !current.is_empty() {
                runs.push(CriticalBlock { machine, ops: std::mem::take(&mut current) });
            }
        }
        if !current.is_empty() {
            runs.push(CriticalBlock { machine, ops: current });
        }
    }
    runs
}

/// Removes moves that provably cannot reduce the makespan: reinsertions of
/// the first block's first operation at an inner position of that block, and
/// reinsertions of the last block's last operation at an inner position of
/// that block. `blocks` must be the block list of the critical path the moves
/// were generated from; blocks with fewer than three operations are never
/// affected.
pub fn clip(moves: Vec<Move>, blocks: &[CriticalBlock], solution: &Solution) -> Vec<Move> {
    let Some(first_block) = blocks.first() else {
        return moves;
    };
    let last_block = blocks.last().expect("non-empty block list has a last block");
    let inner = |block: &CriticalBlock, machine: usize, op: OpId| -> bool {
        if machine != block.machine || block.len() < 3 {
            return false;
        }
        let pos = solution.pos_of(op);
        solution.pos_of(block.first()) < pos && pos < solution.pos_of(block.last())
    };
    moves
        .into_iter()
        .filter(|m| {
            let head_reinsert = m.u == first_block.first() && inner(first_block, m.machine, m.v);
            let tail_reinsert = m.v == last_block.last() && inner(last_block, m.machine, m.u);
            !(head_reinsert || tail_reinsert)
        })
        .collect()
}
