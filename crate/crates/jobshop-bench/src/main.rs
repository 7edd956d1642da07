//! Seeded benchmark harness for the jobshop tabu-search solver.

use clap::{Args, Parser, Subcommand};
use jobshop::{brute_force_optimum, evaluate, gantt_export, NeighborhoodKind};
use jobshop_bench::harness::{self, BatchSettings, CliError, InputFormat};
use jobshop_bench::report::{self, Emit, GroupRow, ReAggregation, RunRecord, Summary};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "jobshop-bench",
    version,
    about = "Benchmark harness for the jobshop tabu-search solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one instance with one neighborhood over several seeds.
    Run(RunArgs),
    /// Compare neighborhoods over an instance list under a shared budget.
    Compare(CompareArgs),
    /// Exhaustively compute the optimal makespan of a small instance.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Instance file format: orlib or taillard.
    #[arg(long, default_value = "orlib")]
    format: InputFormat,
    /// Neighborhood kind: n5, n6, n7, or n8.
    #[arg(long, default_value = "n8")]
    neighborhood: NeighborhoodKind,
    /// Independent runs; run i uses seed S + i.
    #[arg(long, default_value_t = 10)]
    runs: u64,
    /// Base seed S.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap per run.
    #[arg(long)]
    max_iters: Option<u64>,
    /// Wall-clock cap per run, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Non-improving iterations before a random jump.
    #[arg(long, default_value_t = 200)]
    improve_iter: u64,
    /// Rank at most this many randomly sampled children per iteration.
    #[arg(long)]
    children_cap: Option<usize>,
    /// Bounds file; sets the stop target to the instance's lower bound and
    /// fills the relative-error column.
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or md.
    #[arg(long, default_value = "csv")]
    emit: Emit,
    /// Worker threads for parallel runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Zero the time columns so repeated invocations emit identical bytes.
    #[arg(long)]
    no_times: bool,
    /// Write a per-machine start-time table of the best run's schedule here.
    #[arg(long)]
    gantt: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// File listing instance paths, one per line.
    #[arg(long)]
    instances: PathBuf,
    /// Instance file format: orlib or taillard.
    #[arg(long, default_value = "orlib")]
    format: InputFormat,
    /// Comma-separated neighborhood kinds to compare.
    #[arg(long, value_delimiter = ',', default_value = "n5,n6,n7,n8")]
    neighborhoods: Vec<NeighborhoodKind>,
    /// Independent runs per (instance, neighborhood); run i uses seed S + i.
    #[arg(long, default_value_t = 10)]
    runs: u64,
    /// Base seed S.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shared iteration budget per run.
    #[arg(long)]
    max_iters: Option<u64>,
    /// Shared wall-clock budget per run, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Non-improving iterations before a random jump.
    #[arg(long, default_value_t = 200)]
    improve_iter: u64,
    /// Rank at most this many randomly sampled children per iteration.
    #[arg(long)]
    children_cap: Option<usize>,
    /// Bounds file; required for the MRE group table.
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Instances per aggregation group.
    #[arg(long, default_value_t = 5)]
    group_size: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or md.
    #[arg(long, default_value = "md")]
    emit: Emit,
    /// Worker threads for parallel runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Zero the time columns so repeated invocations emit identical bytes.
    #[arg(long)]
    no_times: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Instance file format: orlib or taillard.
    #[arg(long, default_value = "orlib")]
    format: InputFormat,
    /// Refuse instances with more operations than this.
    #[arg(long, default_value_t = jobshop::ORACLE_OPS_LIMIT)]
    limit: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli.command)));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("internal error: a run panicked; see the message above");
            ExitCode::from(3)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    if args.runs == 0 {
        return Err(CliError::Invalid("--runs must be at least 1".to_string()));
    }
    let instance = harness::load_instance(&args.instance, args.format)?;
    let bounds = match &args.bounds {
        Some(path) => Some(harness::load_bounds(path)?),
        None => None,
    };
    let settings = BatchSettings {
        runs: args.runs,
        base_seed: args.seed,
        max_iters: args.max_iters,
        time_limit: args.time_limit,
        improve_iter: args.improve_iter,
        children_cap: args.children_cap,
        jobs: args.jobs,
        no_times: args.no_times,
    };
    let records = harness::run_batch(
        std::slice::from_ref(&instance),
        &[args.neighborhood],
        bounds.as_ref(),
        &settings,
    );
    let lower_bound = bounds.as_ref().and_then(|b| b.lower(instance.name()));
    let summary = report::summarize(&records, lower_bound).expect("at least one run");
    let text = match args.emit {
        Emit::Csv => report::csv_report(&records, &[summary], &[], &[]),
        Emit::Md => {
            let title = format!("Run report: {}", instance.name());
            report::md_report(&title, &records, &[summary], &[], &[])
        }
    };
    write_out(args.out.as_deref(), &text)?;
    if let Some(path) = &args.gantt {
        write_gantt(path, &instance, &records, &settings)?;
    }
    Ok(())
}

/// Reruns the best record's seed (runs are deterministic) and writes the
/// start-time table of the schedule it found.
fn write_gantt(
    path: &Path,
    instance: &jobshop::Instance,
    records: &[RunRecord],
    settings: &BatchSettings,
) -> Result<(), CliError> {
    let best = records
        .iter()
        .min_by_key(|r| r.best)
        .expect("at least one run");
    let config = harness::run_config(
        best.neighborhood,
        best.seed,
        Some(best.best),
        settings,
    );
    let stats = jobshop::run(instance, &config);
    let data = evaluate(instance, &stats.best_solution).expect("search result is feasible");
    std::fs::write(path, gantt_export(instance, &stats.best_solution, &data)).map_err(|source| {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    })
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    if args.runs == 0 {
        return Err(CliError::Invalid("--runs must be at least 1".to_string()));
    }
    if args.neighborhoods.is_empty() {
        return Err(CliError::Invalid("--neighborhoods must name at least one kind".to_string()));
    }
    if args.group_size == 0 {
        return Err(CliError::Invalid("--group-size must be at least 1".to_string()));
    }
    let paths = harness::read_instance_list(&args.instances)?;
    if paths.is_empty() {
        return Err(CliError::Invalid(format!(
            "instance list `{}` names no instances",
            args.instances.display()
        )));
    }
    let instances = paths
        .iter()
        .map(|path| harness::load_instance(path, args.format))
        .collect::<Result<Vec<_>, _>>()?;
    let bounds = match &args.bounds {
        Some(path) => Some(harness::load_bounds(path)?),
        None => None,
    };
    let settings = BatchSettings {
        runs: args.runs,
        base_seed: args.seed,
        max_iters: args.max_iters,
        time_limit: args.time_limit,
        improve_iter: args.improve_iter,
        children_cap: args.children_cap,
        jobs: args.jobs,
        no_times: args.no_times,
    };
    let records = harness::run_batch(&instances, &args.neighborhoods, bounds.as_ref(), &settings);

    let mut summaries: Vec<Summary> = Vec::new();
    for instance in &instances {
        let lower_bound = bounds.as_ref().and_then(|b| b.lower(instance.name()));
        for &kind in &args.neighborhoods {
            let slice: Vec<RunRecord> = records
                .iter()
                .filter(|r| r.instance == instance.name() && r.neighborhood == kind)
                .cloned()
                .collect();
            summaries.push(report::summarize(&slice, lower_bound).expect("at least one run"));
        }
    }

    let mut groups: Vec<GroupRow> = Vec::new();
    if let Some(bounds) = &bounds {
        for chunk in instances.chunks(args.group_size) {
            let names: Vec<&str> = chunk.iter().map(|i| i.name()).collect();
            let label = report::group_label(&names);
            for &kind in &args.neighborhoods {
                let slice: Vec<RunRecord> = records
                    .iter()
                    .filter(|r| names.contains(&r.instance.as_str()) && r.neighborhood == kind)
                    .cloned()
                    .collect();
                let best_mre = report::compute_mre(&slice, bounds, ReAggregation::BestOfRuns)?;
                let mean_mre = report::compute_mre(&slice, bounds, ReAggregation::MeanOfRuns)?;
                let mean_time_to_best =
                    slice.iter().map(|r| r.time_to_best).sum::<f64>() / slice.len() as f64;
                groups.push(GroupRow {
                    label: label.clone(),
                    neighborhood: kind,
                    best_mre,
                    mean_mre,
                    mean_time_to_best,
                });
            }
        }
    }

    let notes = vec![
        "candidate moves in every neighborhood kind pass the same feasibility gate, so \
         differences between kinds reflect the move sets themselves"
            .to_string(),
    ];
    let text = match args.emit {
        Emit::Csv => report::csv_report(&records, &summaries, &groups, &notes),
        Emit::Md => report::md_report("Neighborhood comparison", &records, &summaries, &groups, &notes),
    };
    write_out(args.out.as_deref(), &text)
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let instance = harness::load_instance(&args.instance, args.format)?;
    let result = brute_force_optimum(&instance, args.limit)
        .map_err(|err| CliError::Invalid(err.to_string()))?;
    println!("instance {}", instance.name());
    println!("optimal {}", result.optimal_makespan);
    println!("explored {}", result.explored);
    Ok(())
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
