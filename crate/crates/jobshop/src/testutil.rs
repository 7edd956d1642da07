//! Fixtures shared by the unit tests: the 3x3 example instance with its
//! reference machine orders.

use crate::instance::{builtin_example, Instance};
use crate::schedule::Solution;

/// The example instance with machine orders M1:(O21,O11,O32),
/// M2:(O31,O12,O23), M3:(O22,O13,O33); makespan 10.
pub(crate) fn example_selection() -> (Instance, Solution) {
    let instance = builtin_example();
    let seqs = vec![
        vec![instance.op_id(1, 0), instance.op_id(0, 0), instance.op_id(2, 1)],
        vec![instance.op_id(2, 0), instance.op_id(0, 1), instance.op_id(1, 2)],
        vec![instance.op_id(1, 1), instance.op_id(0, 2), instance.op_id(2, 2)],
    ];
    let solution = Solution::from_sequences(&instance, seqs).unwrap();
    (instance, solution)
}

/// Same as [`example_selection`] but with the second machine's first two
/// operations exchanged; makespan 12.
pub(crate) fn m2_swapped_selection() -> (Instance, Solution) {
    let instance = builtin_example();
    let seqs = vec![
        vec![instance.op_id(1, 0), instance.op_id(0, 0), instance.op_id(2, 1)],
        vec![instance.op_id(0, 1), instance.op_id(2, 0), instance.op_id(1, 2)],
        vec![instance.op_id(1, 1), instance.op_id(0, 2), instance.op_id(2, 2)],
    ];
    let solution = Solution::from_sequences(&instance, seqs).unwrap();
    (instance, solution)
}
