//! Applying moves to machine sequences and estimating the resulting makespan
//! without a full re-evaluation.

use crate::instance::{Instance, OpId};
use crate::neighborhood::{Move, MoveKind};
use crate::schedule::{ScheduleData, Solution};

/// Error returned by [`apply`] for a move that does not match the solution.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error("machine {machine} does not exist")]
    NoSuchMachine { machine: usize },
    #[error("operation {op} is not sequenced on machine {machine}")]
    NotOnMachine { op: OpId, machine: usize },
    #[error("operation {u} must come before operation {v} on the machine")]
    WrongOrder { u: OpId, v: OpId },
}

/// Applies a move, returning the reordered solution. Only the span between
/// the move's endpoints changes: a Forward move rotates `u` to the back of
/// the span, a Backward move rotates `v` to the front. The input solution is
/// left untouched.
pub fn apply(mv: &Move, solution: &Solution) -> Result<Solution, ApplyError> {
    let seqs = solution.sequences();
    if mv.machine >= seqs.len() {
        return Err(ApplyError::NoSuchMachine { machine: mv.machine });
    }
    let seq = &seqs[mv.machine];
    let pu = seq
        .iter()
        .position(|&op| op == mv.u)
        .ok_or(ApplyError::NotOnMachine { op: mv.u, machine: mv.machine })?;
    let pv = seq
        .iter()
        .position(|&op| op == mv.v)
        .ok_or(ApplyError::NotOnMachine { op: mv.v, machine: mv.machine })?;
    if pu >= pv {
        return Err(ApplyError::WrongOrder { u: mv.u, v: mv.v });
    }
    let mut new_seq = seq.clone();
    match mv.kind {
        MoveKind::Forward => new_seq[pu..=pv].rotate_left(1),
        MoveKind::Backward => new_seq[pu..=pv].rotate_right(1),
    }
    let mut next = solution.clone();
    next.replace_seq(mv.machine, new_seq);
    Ok(next)
}

/// The machine, start position, and operation order that the span of `mv`
/// would take after applying it, computed without building the new solution.
/// The move must be valid for `solution`.
pub fn segment_after(mv: &Move, solution: &Solution) -> (usize, usize, Vec<OpId>) {
    let pu = solution.pos_of(mv.u);
    let pv = solution.pos_of(mv.v);
    debug_assert!(pu < pv);
    let mut span = solution.seq(mv.machine)[pu..=pv].to_vec();
    match mv.kind {
        MoveKind::Forward => span.rotate_left(1),
        MoveKind::Backward => span.rotate_right(1),
    }
    (mv.machine, pu, span)
}

/// The machine, start position, and current operation order of the span of
/// `mv`, before the move is applied. This is the arrangement a later move
/// would have to recreate in order to undo `mv`.
pub fn segment_before(mv: &Move, solution: &Solution) -> (usize, usize, Vec<OpId>) {
    let pu = solution.pos_of(mv.u);
    let pv = solution.pos_of(mv.v);
    debug_assert!(pu < pv);
    (mv.machine, pu, solution.seq(mv.machine)[pu..=pv].to_vec())
}

/// Makespan estimate for a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveEstimate {
    pub estimated_makespan: u32,
}

/// Estimates the makespan after `mv` by chaining one head pass and one tail
/// pass over the reordered span, using the unchanged heads and tails outside
/// it. The estimate never exceeds the true makespan of the reordered
/// schedule, and equals it whenever some longest path of that schedule runs
/// through the span.
pub fn estimate(
    mv: &Move,
    instance: &Instance,
    solution: &Solution,
    data: &ScheduleData,
) -> MoveEstimate {
    let seq = solution.seq(mv.machine);
    let pu = solution.pos_of(mv.u);
    let pv = solution.pos_of(mv.v);
    debug_assert!(pu < pv && seq[pu] == mv.u && seq[pv] == mv.v);
    let boundary_head = if pu > 0 {
        let before = seq[pu - 1];
        data.head(before) + instance.op_duration(before)
    } else {
        0
    };
    let boundary_tail = seq.get(pv + 1).map_or(0, |&after| data.tail(after));
    let mut span = seq[pu..=pv].to_vec();
    match mv.kind {
        MoveKind::Forward => span.rotate_left(1),
        MoveKind::Backward => span.rotate_right(1),
    }
    let mut heads = vec![0u32; span.len()];
    let mut prev_finish = boundary_head;
    for (i, &op) in span.iter().enumerate() {
        let job_ready = instance
            .job_pred(op)
            .map_or(0, |jp| data.head(jp) + instance.op_duration(jp));
        heads[i] = job_ready.max(prev_finish);
        prev_finish = heads[i] + instance.op_duration(op);
    }
    let mut estimated = 0u32;
    let mut next_tail = boundary_tail;
    for (i, &op) in span.iter().enumerate().rev() {
        let job_tail = instance.job_succ(op).map_or(0, |js| data.tail(js));
        let tail = instance.op_duration(op) + job_tail.max(next_tail);
        next_tail = tail;
        estimated = estimated.max(heads[i] + tail);
    }
    MoveEstimate { estimated_makespan: estimated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::neighborhood::{generate, NeighborhoodKind};
    use crate::schedule::evaluate;
    use crate::testutil::example_selection;

    fn forward(machine: usize, u: OpId, v: OpId) -> Move {
        Move { kind: MoveKind::Forward, machine, u, v }
    }

    fn backward(machine: usize, u: OpId, v: OpId) -> Move {
        Move { kind: MoveKind::Backward, machine, u, v }
    }

    #[test]
    fn forward_application_rotates_the_span_left() {
        let (_, solution) = example_selection();
        let next = apply(&forward(2, 2, 8), &solution).unwrap();
        assert_eq!(next.seq(2), &[4, 8, 2]);
        assert_eq!(next.seq(0), solution.seq(0));
        assert_eq!(next.seq(1), solution.seq(1));
        // The input is untouched.
        assert_eq!(solution.seq(2), &[4, 2, 8]);
    }

    #[test]
    fn backward_application_rotates_the_span_right() {
        let (_, solution) = example_selection();
        let next = apply(&backward(1, 6, 1), &solution).unwrap();
        assert_eq!(next.seq(1), &[1, 6, 5]);
        assert_eq!(solution.seq(1), &[6, 1, 5]);
    }

    #[test]
    fn adjacent_forward_and_backward_moves_coincide() {
        let (instance, solution) = example_selection();
        let data = evaluate(&instance, &solution).unwrap();
        let f = forward(1, 6, 1);
        let b = backward(1, 6, 1);
        assert_eq!(
            apply(&f, &solution).unwrap().sequences(),
            apply(&b, &solution).unwrap().sequences()
        );
        assert_eq!(
            estimate(&f, &instance, &solution, &data),
            estimate(&b, &instance, &solution, &data)
        );
    }

    #[test]
    fn invalid_moves_are_rejected() {
        let (_, solution) = example_selection();
        assert_eq!(
            apply(&forward(7, 2, 8), &solution),
            Err(ApplyError::NoSuchMachine { machine: 7 })
        );
        assert_eq!(
            apply(&forward(2, 0, 8), &solution),
            Err(ApplyError::NotOnMachine { op: 0, machine: 2 })
        );
        assert_eq!(
            apply(&forward(2, 8, 2), &solution),
            Err(ApplyError::WrongOrder { u: 8, v: 2 })
        );
    }

    #[test]
    fn estimate_matches_the_hand_computed_backward_example() {
        let (instance, solution) = example_selection();
        let data = evaluate(&instance, &solution).unwrap();
        let mv = backward(1, 6, 1);
        assert_eq!(estimate(&mv, &instance, &solution, &data).estimated_makespan, 12);
        let exact = evaluate(&instance, &apply(&mv, &solution).unwrap()).unwrap();
        assert_eq!(exact.makespan(), 12);
    }

    #[test]
    fn estimate_matches_the_hand_computed_forward_example() {
        let (instance, solution) = example_selection();
        let data = evaluate(&instance, &solution).unwrap();
        let mv = forward(2, 2, 8);
        assert_eq!(estimate(&mv, &instance, &solution, &data).estimated_makespan, 11);
        let exact = evaluate(&instance, &apply(&mv, &solution).unwrap()).unwrap();
        assert_eq!(exact.makespan(), 11);
    }

    #[test]
    fn estimate_covers_spans_with_interior_operations() {
        let instance = Instance::new(
            "line",
            1,
            vec![vec![(0, 3)], vec![(0, 4)], vec![(0, 2)]],
        )
        .unwrap();
        let solution = Solution::from_sequences(&instance, vec![vec![1, 0, 2]]).unwrap();
        let data = evaluate(&instance, &solution).unwrap();
        let mv = forward(0, 1, 2);
        assert_eq!(estimate(&mv, &instance, &solution, &data).estimated_makespan, 9);
        let next = apply(&mv, &solution).unwrap();
        assert_eq!(next.seq(0), &[0, 2, 1]);
        assert_eq!(evaluate(&instance, &next).unwrap().makespan(), 9);
    }

    #[test]
    fn estimates_bound_the_exact_makespan_on_example_moves() {
        let (instance, solution) = example_selection();
        let data = evaluate(&instance, &solution).unwrap();
        for mv in generate(NeighborhoodKind::N8, &instance, &solution, &data) {
            let est = estimate(&mv, &instance, &solution, &data).estimated_makespan;
            let exact = evaluate(&instance, &apply(&mv, &solution).unwrap())
                .unwrap()
                .makespan();
            assert!(est <= exact);
            assert!(exact <= est.max(data.makespan()));
        }
    }

    #[test]
    fn span_segments_reflect_the_applied_order() {
        let (_, solution) = example_selection();
        assert_eq!(segment_after(&forward(2, 2, 8), &solution), (2, 1, vec![8, 2]));
        assert_eq!(segment_after(&backward(1, 6, 1), &solution), (1, 0, vec![1, 6]));
        assert_eq!(segment_before(&forward(2, 2, 8), &solution), (2, 1, vec![2, 8]));
        assert_eq!(segment_before(&backward(1, 6, 1), &solution), (1, 0, vec![6, 1]));
    }
}
