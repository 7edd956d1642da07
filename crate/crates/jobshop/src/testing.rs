//! Randomized instance and solution generators for property tests and
//! external test harnesses.

use rand::Rng;

use crate::instance::Instance;
use crate::schedule::Solution;

/// Generates a random instance with up to `max_jobs` jobs and `max_machines`
/// machines. Each job visits a random subset of distinct machines in random
/// order; durations are drawn from `1..=max_duration`.
pub fn random_instance(
    rng: &mut impl Rng,
    max_jobs: usize,
    max_machines: usize,
    max_duration: u32,
) -> Instance {
    assert!(max_jobs >= 1 && max_machines >= 1 && max_duration >= 1);
    let num_jobs = rng.random_range(1..=max_jobs);
    let num_machines = rng.random_range(1..=max_machines);
    let mut routes = Vec::with_capacity(num_jobs);
    for _ in 0..num_jobs {
        let len = rng.random_range(1..=num_machines);
        routes.push(random_route(rng, num_machines, len, max_duration, false));
    }
    Instance::new("random", num_machines, routes).expect("generated routes are valid")
}

/// Like [`random_instance`] but durations are drawn from `0..=max_duration`,
/// so zero-length operations appear with probability `1/(max_duration+1)`
/// per operation. Useful for exercising degenerate timing cases.
pub fn random_instance_with_zero_durations(
    rng: &mut impl Rng,
    max_jobs: usize,
    max_machines: usize,
    max_duration: u32,
) -> Instance {
    assert!(max_jobs >= 1 && max_machines >= 1 && max_duration >= 1);
    let num_jobs = rng.random_range(1..=max_jobs);
    let num_machines = rng.random_range(1..=max_machines);
    let mut routes = Vec::with_capacity(num_jobs);
    for _ in 0..num_jobs {
        let len = rng.random_range(1..=num_machines);
        routes.push(random_route(rng, num_machines, len, max_duration, true));
    }
    Instance::new("random", num_machines, routes).expect("generated routes are valid")
}

/// Generates a random instance whose total operation count is at most
/// `max_total_ops`. Intended for exhaustive-search cross-checks where the
/// instance must stay tiny. Durations are drawn from `1..=max_duration`.
pub fn random_instance_with_total_ops(
    rng: &mut impl Rng,
    max_total_ops: usize,
    max_machines: usize,
    max_duration: u32,
) -> Instance {
    assert!(max_total_ops >= 1 && max_machines >= 1 && max_duration >= 1);
    let num_machines = rng.random_range(1..=max_machines);
    let mut routes = Vec::new();
    let mut budget = rng.random_range(1..=max_total_ops);
    while budget > 0 {
        let len = rng.random_range(1..=num_machines.min(budget));
        routes.push(random_route(rng, num_machines, len, max_duration, false));
        budget -= len;
    }
    Instance::new("random", num_machines, routes).expect("generated routes are valid")
}

fn random_route(
    rng: &mut impl Rng,
    num_machines: usize,
    len: usize,
    max_duration: u32,
    allow_zero: bool,
) -> Vec<(usize, u32)> {
    let mut machines: Vec<usize> = (0..num_machines).collect();
    for i in 0..len {
        let j = rng.random_range(i..num_machines);
        machines.swap(i, j);
    }
    machines[..len]
        .iter()
        .map(|&machine| {
            let lo = if allow_zero { 0 } else { 1 };
            (machine, rng.random_range(lo..=max_duration))
        })
        .collect()
}

/// Produces a uniformly random feasible solution by dispatching: repeatedly
/// picks one of the currently route-ready operations at random and appends it
/// to its machine. Every feasible machine ordering can be produced this way.
pub fn random_feasible_solution(instance: &Instance, rng: &mut impl Rng) -> Solution {
    let mut seqs: Vec<Vec<usize>> = vec![Vec::new(); instance.num_machines()];
    let mut ready: Vec<usize> = (0..instance.num_jobs())
        .filter(|&j| instance.job_len(j) > 0)
        .map(|j| instance.op_id(j, 0))
        .collect();
    while !ready.is_empty() {
        let i = rng.random_range(0..ready.len());
        let op = ready.swap_remove(i);
        seqs[instance.op_machine(op)].push(op);
        if let Some(succ) = instance.job_succ(op) {
            ready.push(succ);
        }
    }
    Solution::from_sequences(instance, seqs).expect("dispatch order is feasible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::evaluate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_instances_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let instance = random_instance(&mut rng, 6, 5, 9);
            assert!(instance.num_jobs() >= 1 && instance.num_jobs() <= 6);
            assert!(instance.num_machines() >= 1 && instance.num_machines() <= 5);
            for job in 0..instance.num_jobs() {
                let route = &instance.routes()[job];
                let mut seen = std::collections::HashSet::new();
                for &(machine, duration) in route {
                    assert!(machine < instance.num_machines());
                    assert!((1..=9).contains(&duration));
                    assert!(seen.insert(machine), "machine repeated within a job");
                }
            }
        }
    }

    #[test]
    fn capped_instances_respect_total_ops() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let instance = random_instance_with_total_ops(&mut rng, 12, 4, 9);
            assert!(instance.num_ops() >= 1 && instance.num_ops() <= 12);
        }
    }

    #[test]
    fn zero_duration_variant_produces_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut saw_zero = false;
        for _ in 0..100 {
            let instance = random_instance_with_zero_durations(&mut rng, 6, 5, 4);
            saw_zero |= (0..instance.num_ops()).any(|op| instance.op_duration(op) == 0);
        }
        assert!(saw_zero);
    }

    #[test]
    fn random_solutions_evaluate_cleanly() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let instance = random_instance(&mut rng, 6, 5, 9);
            let solution = random_feasible_solution(&instance, &mut rng);
            let data = evaluate(&instance, &solution).expect("dispatch solutions are acyclic");
            assert!(data.makespan() >= crate::instance::simple_lower_bound(&instance));
        }
    }

    #[test]
    fn dispatch_is_seed_deterministic() {
        let instance = crate::instance::builtin_example();
        let a = random_feasible_solution(&instance, &mut ChaCha8Rng::seed_from_u64(42));
        let b = random_feasible_solution(&instance, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a.sequences(), b.sequences());
    }
}
