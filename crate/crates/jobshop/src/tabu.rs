//! Tabu search over the critical-block neighborhoods: estimate-ranked move
//! selection, segment-based tabu memory, and random jumps to a child schedule
//! after a run of non-improving iterations.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{simple_lower_bound, Instance, OpId};
use crate::move_eval::{apply, estimate, segment_after, segment_before};
use crate::neighborhood::{clip, generate_with, GenOptions, Move, NeighborhoodKind};
use crate::schedule::{critical_blocks, critical_path, evaluate, Solution};

/// Parameters of one search run.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub neighborhood: NeighborhoodKind,
    pub seed: u64,
    /// Hard cap on iterations.
    pub max_iters: u64,
    /// Number of consecutive non-improving iterations after which the search
    /// jumps to a uniformly random child of the incumbent.
    pub improve_iter: u64,
    pub time_limit: Option<Duration>,
    /// Stop as soon as the best makespan reaches this value. Defaults to the
    /// load-based lower bound of the instance when unset.
    pub target: Option<u32>,
    /// Rank and select among at most this many children per iteration. When
    /// more moves exist, a uniform random subset of this size is drawn, which
    /// keeps the fixed-size tabu list effective on instances whose critical
    /// blocks spawn hundreds of insertions.
    pub children_cap: Option<usize>,
    /// Cap on how far outside-block insertions reach; see
    /// [`GenOptions::outside_window`].
    pub outside_window: Option<usize>,
    /// Build blocks from every critical path instead of one canonical path.
    pub all_critical_paths: bool,
    /// Rank children by exact re-evaluation instead of the estimate.
    pub exact_ranking: bool,
    /// Shuffle the children before selection so ties between equal-ranked
    /// moves are broken randomly instead of by generation order.
    pub shuffle_ties: bool,
}

impl SearchConfig {
    pub fn new(neighborhood: NeighborhoodKind, seed: u64) -> Self {
        SearchConfig {
            neighborhood,
            seed,
            max_iters: 50_000_000,
            improve_iter: 200,
            time_limit: None,
            target: None,
            children_cap: None,
            outside_window: None,
            all_critical_paths: false,
            exact_ranking: false,
            shuffle_ties: false,
        }
    }
}

/// Why a search run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The best makespan reached the target value.
    TargetReached,
    /// The iteration cap was hit.
    IterationLimit,
    /// The wall-clock limit was hit.
    TimeLimit,
    /// No moves were available; reported as a diagnostic, not an error.
    EmptyNeighborhood,
}

/// Outcome of one search run.
#[derive(Debug, Clone)]
pub struct SearchStats {
    pub best_makespan: u32,
    pub best_solution: Solution,
    pub iterations: u64,
    /// Number of times the best makespan improved.
    pub improving_steps: u64,
    /// Number of random jumps taken after stretches of non-improvement.
    pub restarts: u64,
    pub wall_time: Duration,
    pub time_to_best: Duration,
    pub iteration_of_best: u64,
    pub stop_reason: StopReason,
}

/// Base tabu tenure for an instance with `n` jobs and `m` machines.
pub fn tenure_base(n: usize, m: usize) -> u64 {
    10 + (n / m) as u64
}

/// Inclusive sampling range for tenures drawn around the base value `l`.
pub fn tenure_range(l: u64) -> (u64, u64) {
    (l, l + l / 2)
}

/// One forbidden span arrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabuEntry {
    pub machine: usize,
    pub start_pos: usize,
    pub segment: Vec<OpId>,
    /// Last iteration at which the entry is still in force.
    pub expires_at: u64,
}

/// Recorded span arrangements that moves may not recreate while in force.
#[derive(Debug, Clone, Default)]
pub struct TabuList {
    entries: Vec<TabuEntry>,
}

impl TabuList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, machine: usize, start_pos: usize, segment: Vec<OpId>, expires_at: u64) {
        self.entries.push(TabuEntry { machine, start_pos, segment, expires_at });
    }

    /// Drops entries that are no longer in force at `iteration`.
    pub fn purge(&mut self, iteration: u64) {
        self.entries.retain(|e| e.expires_at >= iteration);
    }

    pub fn entries(&self) -> &[TabuEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// True when the span arrangement that `mv` would create matches an entry
/// still in force at `iteration`, at the same machine and start position.
pub fn is_tabu(mv: &Move, solution: &Solution, tabu: &TabuList, iteration: u64) -> bool {
    let (machine, start_pos, segment) = segment_after(mv, solution);
    tabu.entries.iter().any(|e| {
        e.expires_at >= iteration
            && e.machine == machine
            && e.start_pos == start_pos
            && e.segment == segment
    })
}

/// Picks the child with the lowest ranking value among those that are not
/// tabu or whose value beats the best makespan found so far. When every
/// child is tabu and none aspires, a uniformly random child is returned.
/// Ties go to the earliest child in the slice.
pub fn select_move<'a>(
    children: &'a [(Move, u32)],
    solution: &Solution,
    best_makespan: u32,
    tabu: &TabuList,
    iteration: u64,
    rng: &mut impl Rng,
) -> &'a (Move, u32) {
    assert!(!children.is_empty(), "cannot select from an empty child list");
    let mut chosen: Option<&(Move, u32)> = None;
    for child in children {
        let admissible =
            child.1 < best_makespan || !is_tabu(&child.0, solution, tabu, iteration);
        if admissible && chosen.map_or(true, |c| child.1 < c.1) {
            chosen = Some(child);
        }
    }
    chosen.unwrap_or_else(|| &children[rng.random_range(0..children.len())])
}

/// Builds an active schedule by randomized dispatching: at every step the
/// machine with the earliest possible completion is located and one of the
/// operations on it that could start before that completion is scheduled,
/// chosen uniformly at random.
pub fn initial_solution(instance: &Instance, rng: &mut impl Rng) -> Solution {
    let mut next_pos = vec![0usize; instance.num_jobs()];
    let mut job_ready = vec![0u32; instance.num_jobs()];
    let mut machine_ready = vec![0u32; instance.num_machines()];
    let mut seqs: Vec<Vec<OpId>> = vec![Vec::new(); instance.num_machines()];
    let mut conflict: Vec<OpId> = Vec::new();
    for _ in 0..instance.num_ops() {
        let mut best_completion = u32::MAX;
        let mut chosen_machine = usize::MAX;
        for j in 0..instance.num_jobs() {
            if next_pos[j] >= instance.job_len(j) {
                continue;
            }
            let op = instance.op_id(j, next_pos[j]);
            let machine = instance.op_machine(op);
            let start = job_ready[j].max(machine_ready[machine]);
            let completion = start + instance.op_duration(op);
            if completion < best_completion
                || (completion == best_completion && machine < chosen_machine)
            {
                best_completion = completion;
                chosen_machine = machine;
            }
        }
        conflict.clear();
        for j in 0..instance.num_jobs() {
            if next_pos[j] >= instance.job_len(j) {
                continue;
            }
            let op = instance.op_id(j, next_pos[j]);
            if instance.op_machine(op) != chosen_machine {
                continue;
            }
            let start = job_ready[j].max(machine_ready[chosen_machine]);
            if start < best_completion || start + instance.op_duration(op) == best_completion {
                conflict.push(op);
            }
        }
        let op = conflict[rng.random_range(0..conflict.len())];
        let j = instance.op_job(op);
        let start = job_ready[j].max(machine_ready[chosen_machine]);
        let finish = start + instance.op_duration(op);
        seqs[chosen_machine].push(op);
        job_ready[j] = finish;
        machine_ready[chosen_machine] = finish;
        next_pos[j] += 1;
    }
    Solution::from_sequences(instance, seqs).expect("dispatch order is feasible")
}

/// Runs tabu search and returns the best solution found with run statistics.
/// Each iteration ranks the feasibility-gated children of the incumbent,
/// moves to the selected child, and records the pre-move span arrangement as
/// tabu so the step cannot be undone while the entry is in force. After
/// `improve_iter` consecutive non-improving iterations the incumbent is
/// replaced by a uniformly random child instead; the tabu list persists
/// across such jumps.
pub fn run(instance: &Instance, config: &SearchConfig) -> SearchStats {
    let start_time = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let target = config.target.unwrap_or_else(|| simple_lower_bound(instance));
    let mut current = initial_solution(instance, &mut rng);
    let mut current_data = evaluate(instance, &current).expect("dispatch schedules are feasible");
    let mut best = current.clone();
    let mut best_makespan = current_data.makespan();
    let mut iterations: u64 = 0;
    let mut improving_steps: u64 = 0;
    let mut restarts: u64 = 0;
    let mut iteration_of_best: u64 = 0;
    let mut time_to_best = start_time.elapsed();
    let mut stalled: u64 = 0;
    let mut tabu = TabuList::new();
    let (tenure_lo, tenure_hi) =
        tenure_range(tenure_base(instance.num_jobs(), instance.num_machines()));
    let options = GenOptions {
        outside_window: config.outside_window,
        all_critical_paths: config.all_critical_paths,
    };
    let stop_reason = loop {
        if best_makespan <= target {
            break StopReason::TargetReached;
        }
        if iterations >= config.max_iters {
            break StopReason::IterationLimit;
        }
        if let Some(limit) = config.time_limit {
            if start_time.elapsed() >= limit {
                break StopReason::TimeLimit;
            }
        }
        let mut moves =
            generate_with(config.neighborhood, instance, &current, &current_data, &options);
        if config.neighborhood == NeighborhoodKind::N8 {
            let path = critical_path(instance, &current, &current_data);
            let blocks = critical_blocks(instance, &current, &path);
            moves = clip(moves, &blocks, &current);
        }
        if let Some(cap) = config.children_cap {
            if moves.len() > cap {
                use rand::seq::SliceRandom;
                moves.partial_shuffle(&mut rng, cap);
                moves.truncate(cap);
            }
        }
        if moves.is_empty() {
            break StopReason::EmptyNeighborhood;
        }
        iterations += 1;
        tabu.purge(iterations);
        let mut children: Vec<(Move, u32)> = moves
            .into_iter()
            .map(|m| {
                let value = if config.exact_ranking {
                    let child = apply(&m, &current).expect("generated moves are valid");
                    evaluate(instance, &child)
                        .expect("gated moves stay feasible")
                        .makespan()
                } else {
                    estimate(&m, instance, &current, &current_data).estimated_makespan
                };
                (m, value)
            })
            .collect();
        if config.shuffle_ties {
            use rand::seq::SliceRandom;
            children.shuffle(&mut rng);
        }
        let &(chosen, _) =
            select_move(&children, &current, best_makespan, &tabu, iterations, &mut rng);
        let next = apply(&chosen, &current).expect("generated moves are valid");
        let next_data = evaluate(instance, &next).expect("gated moves stay feasible");
        let mut segment = segment_before(&chosen, &current);
        if next_data.makespan() < best_makespan {
            best = next.clone();
            best_makespan = next_data.makespan();
            improving_steps += 1;
            iteration_of_best = iterations;
            time_to_best = start_time.elapsed();
            stalled = 0;
        } else {
            stalled += 1;
        }
        let (mut new_current, mut new_data) = (next, next_data);
        if stalled > 0 && stalled >= config.improve_iter {
            let (jump, _) = children[rng.random_range(0..children.len())];
            let jumped = apply(&jump, &current).expect("generated moves are valid");
            let jumped_data = evaluate(instance, &jumped).expect("gated moves stay feasible");
            segment = segment_before(&jump, &current);
            if jumped_data.makespan() < best_makespan {
                best = jumped.clone();
                best_makespan = jumped_data.makespan();
                improving_steps += 1;
                iteration_of_best = iterations;
                time_to_best = start_time.elapsed();
            }
            new_current = jumped;
            new_data = jumped_data;
            stalled = 0;
            restarts += 1;
        }
        let tenure = rng.random_range(tenure_lo..=tenure_hi);
        tabu.record(segment.0, segment.1, segment.2, iterations + tenure);
        current = new_current;
        current_data = new_data;
    };
    let check = evaluate(instance, &best).expect("best solution stays feasible");
    assert_eq!(check.makespan(), best_makespan, "best solution re-validation");
    SearchStats {
        best_makespan,
        best_solution: best,
        iterations,
        improving_steps,
        restarts,
        wall_time: start_time.elapsed(),
        time_to_best,
        iteration_of_best,
        stop_reason,
    }
}
