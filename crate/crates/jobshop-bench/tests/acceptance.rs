//! Acceptance gate: ten checks covering solver quality on classic benchmark
//! instances, soundness of the feasibility gates and clipping rules,
//! estimation guarantees, neighborhood containment, oracle agreement on tiny
//! instances, and byte-level report determinism. Each check prints one
//! PASS/FAIL line; the test fails if any check fails.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use jobshop::testing::{random_feasible_solution, random_instance, random_instance_with_total_ops};
use jobshop::{
    apply, brute_force_optimum, builtin_example, clip, critical_blocks, critical_path, estimate,
    evaluate, generate, parse_orlib, run, KnownBounds, NeighborhoodKind, SearchConfig,
    ORACLE_OPS_LIMIT,
};
use jobshop_bench::{compute_mre, run_batch, BatchSettings, ReAggregation, RunRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: u64 = 10;
/// Child-sampling cap used for the benchmark-quality checks; bounding the
/// ranked set keeps the fixed-size tabu list effective on instances whose
/// critical blocks spawn hundreds of insertions.
const CHILD_CAP: usize = 20;

fn instances_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn load(name: &str) -> jobshop::Instance {
    let path = instances_dir().join(format!("{name}.txt"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|err| panic!("cannot read {}: {err}", path.display()));
    parse_orlib(&text)
        .unwrap_or_else(|err| panic!("cannot parse {}: {err}", path.display()))
        .with_name(name)
}

fn bounds() -> KnownBounds {
    let path = instances_dir().join("bounds.txt");
    KnownBounds::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn check(&mut self, number: u32, name: &str, passed: bool, detail: String) {
        let verdict = if passed { "PASS" } else { "FAIL" };
        emit(&format!("criterion {number} ({name}): {verdict} - {detail}"));
        if !passed {
            self.failures.push(format!("criterion {number} ({name}): {detail}"));
        }
    }
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate { failures: Vec::new() };
    criterion_1_tiny_optimality(&mut gate);
    criterion_2_ft10(&mut gate);
    criterion_3_la01_05(&mut gate);
    criterion_4_orb(&mut gate);
    criterion_5_neighborhood_ordering(&mut gate);
    criterion_6_and_7_soundness_and_estimation(&mut gate);
    criterion_8_containment(&mut gate);
    criterion_9_oracle_equivalence(&mut gate);
    criterion_10_determinism(&mut gate);
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}

/// The searched optimum of the three-job example must match the exhaustive
/// oracle (10) within one second, for every seed.
fn criterion_1_tiny_optimality(gate: &mut Gate) {
    let instance = builtin_example();
    let oracle = brute_force_optimum(&instance, ORACLE_OPS_LIMIT).unwrap();
    let mut reached = 0;
    let mut worst = Duration::ZERO;
    for seed in 0..SEEDS {
        let mut config = SearchConfig::new(NeighborhoodKind::N8, seed);
        config.target = Some(oracle.optimal_makespan);
        config.time_limit = Some(Duration::from_secs(1));
        config.max_iters = u64::MAX;
        let stats = run(&instance, &config);
        if stats.best_makespan == oracle.optimal_makespan {
            reached += 1;
            worst = worst.max(stats.time_to_best);
        }
    }
    gate.check(
        1,
        "3x3 optimality",
        oracle.optimal_makespan == 10 && reached == SEEDS,
        format!(
            "oracle optimum {}, {reached}/{SEEDS} seeds reached it within 1 s (slowest {:.3} s)",
            oracle.optimal_makespan,
            worst.as_secs_f64()
        ),
    );
}

/// FT10: within a ten-minute budget (ten 60-second runs), at least one seed
/// must reach the optimum 930 and at least eight must finish at 940 or below.
fn criterion_2_ft10(gate: &mut Gate) {
    let instance = load("ft10");
    let settings = BatchSettings {
        runs: SEEDS,
        time_limit: Some(60.0),
        children_cap: Some(CHILD_CAP),
        ..BatchSettings::default()
    };
    let records = run_batch(
        std::slice::from_ref(&instance),
        &[NeighborhoodKind::N8],
        Some(&bounds()),
        &settings,
    );
    let optimal = records.iter().filter(|r| r.best == 930).count();
    let near = records.iter().filter(|r| r.best <= 940).count();
    let bests: Vec<u32> = records.iter().map(|r| r.best).collect();
    gate.check(
        2,
        "ft10 quality",
        optimal >= 1 && near >= 8,
        format!("{optimal}/10 runs reached 930, {near}/10 reached <= 940; bests {bests:?}"),
    );
}

/// Every seeded run on each of la01..la05 must reach the known lower bound
/// within ten seconds.
fn criterion_3_la01_05(gate: &mut Gate) {
    let names = ["la01", "la02", "la03", "la04", "la05"];
    let instances: Vec<_> = names.iter().map(|n| load(n)).collect();
    let known = bounds();
    let settings = BatchSettings {
        runs: SEEDS,
        time_limit: Some(10.0),
        children_cap: Some(CHILD_CAP),
        ..BatchSettings::default()
    };
    let records = run_batch(&instances, &[NeighborhoodKind::N8], Some(&known), &settings);
    let mut missed = Vec::new();
    let mut slowest = 0.0f64;
    for record in &records {
        let lb = known.lower(&record.instance).unwrap();
        if record.best > lb {
            missed.push(format!("{} seed {} best {}", record.instance, record.seed, record.best));
        }
        slowest = slowest.max(record.time_to_best);
    }
    gate.check(
        3,
        "la01-la05 lower bounds",
        missed.is_empty(),
        if missed.is_empty() {
            format!("all 50 runs reached their LB within 10 s (slowest {slowest:.2} s)")
        } else {
            format!("{} of 50 runs missed: {}", missed.len(), missed.join(", "))
        },
    );
}

/// ORB07 (397) and ORB10 (944): at least eight of ten seeds must reach the
/// optimum within sixty seconds on each instance.
fn criterion_4_orb(gate: &mut Gate) {
    let known = bounds();
    let settings = BatchSettings {
        runs: SEEDS,
        time_limit: Some(60.0),
        children_cap: Some(CHILD_CAP),
        ..BatchSettings::default()
    };
    let mut detail = String::new();
    let mut passed = true;
    for name in ["orb07", "orb10"] {
        let instance = load(name);
        let lb = known.lower(name).unwrap();
        let records = run_batch(
            std::slice::from_ref(&instance),
            &[NeighborhoodKind::N8],
            Some(&known),
            &settings,
        );
        let hits = records.iter().filter(|r| r.best == lb).count();
        passed &= hits >= 8;
        let _ = write!(detail, "{name}: {hits}/10 seeds reached {lb}; ");
    }
    gate.check(4, "orb07 and orb10 optima", passed, detail.trim_end().to_string());
}

/// Under an equal per-run time budget on la21..la25, the insertion
/// neighborhood's best-of-runs MRE must not exceed the swap neighborhood's.
fn criterion_5_neighborhood_ordering(gate: &mut Gate) {
    let names = ["la21", "la22", "la23", "la24", "la25"];
    let instances: Vec<_> = names.iter().map(|n| load(n)).collect();
    let known = bounds();
    let settings = BatchSettings {
        runs: 4,
        time_limit: Some(15.0),
        children_cap: Some(CHILD_CAP),
        ..BatchSettings::default()
    };
    let kinds = [NeighborhoodKind::N5, NeighborhoodKind::N8];
    let records = run_batch(&instances, &kinds, Some(&known), &settings);
    let mre = |kind: NeighborhoodKind| {
        let subset: Vec<RunRecord> =
            records.iter().filter(|r| r.neighborhood == kind).cloned().collect();
        compute_mre(&subset, &known, ReAggregation::BestOfRuns).unwrap()
    };
    let n5 = mre(NeighborhoodKind::N5);
    let n8 = mre(NeighborhoodKind::N8);
    gate.check(
        5,
        "neighborhood ordering",
        n8 <= n5,
        format!("la21-25 best-of-4-runs MRE at 15 s each: N8 {n8:.3}% vs N5 {n5:.3}%"),
    );
}

/// Fuzzes feasibility-gated moves and clipped moves on random instances up to
/// 10x10: gated moves must stay acyclic, clipped moves must be provably
/// non-improving, estimates must sandwich the exact makespan, and the
/// estimate must be exact whenever the new critical path crosses the moved
/// span. Runs until both the gate corpus and the clip corpus hold at least
/// ten thousand cases.
///
/// Known behavior: the lower-bound half of the sandwich and the
/// crossing-exactness clause do not hold on arbitrary feasible schedules.
/// The estimation recurrences read pre-move heads and tails of the span
/// operations' job neighbors; when a job arc re-enters the rearranged span,
/// those stale values can describe paths the move just destroyed, so the
/// estimate can exceed the exact makespan on multi-operation insertions
/// (never on adjacent swaps, where such a re-entrant chain would have been a
/// cycle before the move). The checks below are still asserted as stated and
/// report measured counts.
fn criterion_6_and_7_soundness_and_estimation(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let mut gated_cases: u64 = 0;
    let mut clip_cases: u64 = 0;
    let mut acyclic_violations: u64 = 0;
    let mut clip_violations: u64 = 0;
    let mut lower_violations: u64 = 0;
    let mut upper_violations: u64 = 0;
    let mut exactness_violations: u64 = 0;
    while gated_cases < 10_000 || clip_cases < 10_000 {
        let instance = random_instance(&mut rng, 10, 10, 99);
        let solution = random_feasible_solution(&instance, &mut rng);
        let data = evaluate(&instance, &solution).unwrap();
        let moves = generate(NeighborhoodKind::N8, &instance, &solution, &data);
        if moves.is_empty() {
            continue;
        }
        if gated_cases < 10_000 {
            let mv = moves[rng.random_range(0..moves.len())];
            gated_cases += 1;
            match apply(&mv, &solution).ok().and_then(|s| evaluate(&instance, &s).ok().map(|d| (s, d))) {
                None => acyclic_violations += 1,
                Some((moved, moved_data)) => {
                    let est = estimate(&mv, &instance, &solution, &data).estimated_makespan;
                    let exact = moved_data.makespan();
                    if est > exact {
                        lower_violations += 1;
                    }
                    if exact > est.max(data.makespan()) {
                        upper_violations += 1;
                    }
                    let span = span_ops(&solution, &mv);
                    let new_path = critical_path(&instance, &moved, &moved_data);
                    let crosses = new_path.iter().any(|op| span.contains(op));
                    if crosses && est != exact {
                        exactness_violations += 1;
                    }
                }
            }
        }
        if clip_cases < 10_000 {
            let path = critical_path(&instance, &solution, &data);
            let blocks = critical_blocks(&instance, &solution, &path);
            let kept = clip(moves.clone(), &blocks, &solution);
            let dropped: Vec<_> = moves.iter().filter(|m| !kept.contains(*m)).collect();
            if !dropped.is_empty() {
                let mv = dropped[rng.random_range(0..dropped.len())];
                clip_cases += 1;
                let moved = apply(mv, &solution).unwrap();
                let exact = evaluate(&instance, &moved).unwrap().makespan();
                if exact < data.makespan() {
                    clip_violations += 1;
                }
            }
        }
    }
    gate.check(
        6,
        "gate and clip soundness",
        acyclic_violations == 0 && clip_violations == 0,
        format!(
            "{gated_cases} gated moves all acyclic ({acyclic_violations} violations), \
             {clip_cases} clipped moves all non-improving ({clip_violations} violations)"
        ),
    );
    gate.check(
        7,
        "estimation guarantees",
        lower_violations == 0 && upper_violations == 0 && exactness_violations == 0,
        format!(
            "{gated_cases} cases: estimate>exact on {lower_violations} \
             (stale job-neighbor inputs on multi-op insertions), \
             exact>max(estimate,old) on {upper_violations}, \
             crossing-exactness misses {exactness_violations}"
        ),
    );
}

fn span_ops(solution: &jobshop::Solution, mv: &jobshop::Move) -> Vec<usize> {
    let seq = solution.seq(mv.machine);
    let pu = seq.iter().position(|&o| o == mv.u).unwrap();
    let pv = seq.iter().position(|&o| o == mv.v).unwrap();
    seq[pu..=pv].to_vec()
}

/// On one thousand fuzzed schedules, every neighborhood's move set must
/// contain the previous one (swap set inside both insertion sets, block
/// insertions inside the outside-insertion set).
fn criterion_8_containment(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC047A1);
    let kinds = [
        NeighborhoodKind::N5,
        NeighborhoodKind::N6,
        NeighborhoodKind::N7,
        NeighborhoodKind::N8,
    ];
    let mut violations = 0u64;
    for _ in 0..1_000 {
        let instance = random_instance(&mut rng, 10, 10, 99);
        let solution = random_feasible_solution(&instance, &mut rng);
        let data = evaluate(&instance, &solution).unwrap();
        let sets: Vec<Vec<_>> =
            kinds.iter().map(|&k| generate(k, &instance, &solution, &data)).collect();
        for pair in sets.windows(2) {
            for mv in &pair[0] {
                if !pair[1].contains(mv) {
                    violations += 1;
                }
            }
        }
    }
    gate.check(
        8,
        "neighborhood containment",
        violations == 0,
        format!("1000 schedules, {violations} containment violations"),
    );
}

/// On two hundred random instances of at most twelve operations, a
/// million-iteration search must match the exhaustive optimum in at least
/// 99% of the cases.
fn criterion_9_oracle_equivalence(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x09AC1E);
    let mut matched = 0u32;
    let mut mismatches = Vec::new();
    for case in 0..200u32 {
        let instance = loop {
            let candidate = random_instance_with_total_ops(&mut rng, 12, 4, 50);
            let mut per_machine = vec![0usize; candidate.num_machines()];
            for op in 0..candidate.num_ops() {
                per_machine[candidate.op_machine(op)] += 1;
            }
            if per_machine.into_iter().max().unwrap_or(0) <= 7 {
                break candidate;
            }
        };
        let oracle = brute_force_optimum(&instance, 12).unwrap();
        let mut config = SearchConfig::new(NeighborhoodKind::N8, u64::from(case));
        config.max_iters = 1_000_000;
        config.target = Some(oracle.optimal_makespan);
        let stats = run(&instance, &config);
        if stats.best_makespan == oracle.optimal_makespan {
            matched += 1;
        } else {
            mismatches.push(format!(
                "case {case} (seed {case}): search {} vs oracle {}",
                stats.best_makespan, oracle.optimal_makespan
            ));
        }
    }
    gate.check(
        9,
        "oracle equivalence",
        matched >= 198,
        if mismatches.is_empty() {
            format!("{matched}/200 searches matched the exhaustive optimum")
        } else {
            format!("{matched}/200 matched; mismatches: {}", mismatches.join("; "))
        },
    );
}

/// Two identical benchmark invocations with zeroed time columns must produce
/// byte-identical CSV reports; with live timing, only the time column may
/// differ.
fn criterion_10_determinism(gate: &mut Gate) {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let instance = instances_dir().join("ft06.txt");
    let run_once = |label: &str, no_times: bool| -> Vec<u8> {
        let out = dir.join(format!("{label}.csv"));
        let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_jobshop-bench"));
        cmd.args([
            "run",
            "--instance",
            instance.to_str().unwrap(),
            "--runs",
            "3",
            "--max-iters",
            "3000",
            "--out",
            out.to_str().unwrap(),
        ]);
        if no_times {
            cmd.arg("--no-times");
        }
        let status = cmd.status().unwrap();
        assert!(status.success(), "benchmark invocation failed");
        std::fs::read(&out).unwrap()
    };
    let frozen_a = run_once("frozen_a", true);
    let frozen_b = run_once("frozen_b", true);
    let timed_a = run_once("timed_a", false);
    let timed_b = run_once("timed_b", false);
    let strip_times = |bytes: &[u8]| -> String {
        String::from_utf8_lossy(bytes)
            .lines()
            .map(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() == 7 && !line.starts_with('#') && !line.starts_with("instance") {
                    let mut kept = fields.clone();
                    kept[4] = "_";
                    kept.join(",")
                } else if let Some((prefix, rest)) = line.split_once(" t_av=") {
                    let after = rest.split_once(' ').map_or("", |x| x.1);
                    format!("{prefix} t_av=_ {after}")
                } else {
                    line.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let frozen_identical = frozen_a == frozen_b;
    let timed_agree = strip_times(&timed_a) == strip_times(&timed_b);
    gate.check(
        10,
        "report determinism",
        frozen_identical && timed_agree,
        format!(
            "frozen reports byte-identical: {frozen_identical}; \
             timed reports identical outside time columns: {timed_agree}"
        ),
    );
}
