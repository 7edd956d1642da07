//! Instance loading and multi-seed batch execution.

use crate::report::{relative_error, RunRecord};
use jobshop::{
    parse_orlib, parse_taillard, run, Instance, KnownBounds, NeighborhoodKind, ParseError,
    SearchConfig, SearchStats,
};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;
use thiserror::Error;

/// On-disk layout of an instance file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Orlib,
    Taillard,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown instance format `{0}`, expected orlib or taillard")]
pub struct UnknownFormat(pub String);

impl FromStr for InputFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "orlib" => Ok(InputFormat::Orlib),
            "taillard" => Ok(InputFormat::Taillard),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

/// Input-level failures; the binary maps these to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse `{path}`: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Mre(#[from] crate::report::MreError),
    #[error("{0}")]
    Invalid(String),
}

/// Reads and parses one instance file; the instance is named after the file
/// stem so bounds lookups and reports line up.
pub fn load_instance(path: &Path, format: InputFormat) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = match format {
        InputFormat::Orlib => parse_orlib(&text),
        InputFormat::Taillard => parse_taillard(&text),
    }
    .map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .and_then(|stem| stem.to_str())
        .unwrap_or("instance");
    Ok(parsed.with_name(name))
}

/// Reads a `name LB UB` bounds file.
pub fn load_bounds(path: &Path) -> Result<KnownBounds, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    KnownBounds::parse(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a list of instance paths, one per line. Blank lines and `#` comments
/// are skipped; relative paths resolve against the list file's directory.
pub fn read_instance_list(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut paths = Vec::new();
    for line in text.lines() {
        let entry = line.split('#').next().unwrap_or("").trim();
        if entry.is_empty() {
            continue;
        }
        let entry = Path::new(entry);
        paths.push(if entry.is_absolute() {
            entry.to_path_buf()
        } else {
            base.join(entry)
        });
    }
    Ok(paths)
}

/// Knobs shared by every run of a batch.
#[derive(Debug, Clone)]
pub struct BatchSettings {
    /// Independent runs per (instance, neighborhood); run `i` uses seed
    /// `base_seed + i`.
    pub runs: u64,
    pub base_seed: u64,
    /// Iteration cap per run; the search default applies when unset.
    pub max_iters: Option<u64>,
    /// Wall-clock cap per run, in seconds.
    pub time_limit: Option<f64>,
    /// Non-improving iterations before the search jumps to a random child.
    pub improve_iter: u64,
    /// Rank at most this many sampled children per iteration; unset ranks
    /// the full move set.
    pub children_cap: Option<usize>,
    /// Worker threads; 1 runs everything on the calling thread.
    pub jobs: usize,
    /// Zero the reported times so repeated batches emit identical bytes.
    pub no_times: bool,
}

impl Default for BatchSettings {
    fn default() -> Self {
        BatchSettings {
            runs: 10,
            base_seed: 0,
            max_iters: None,
            time_limit: None,
            improve_iter: 200,
            children_cap: None,
            jobs: 1,
            no_times: false,
        }
    }
}

struct Task<'a> {
    instance: &'a Instance,
    lower_bound: Option<u32>,
    config: SearchConfig,
}

/// Builds the search configuration for one run of a batch.
pub fn run_config(
    kind: NeighborhoodKind,
    seed: u64,
    lower_bound: Option<u32>,
    settings: &BatchSettings,
) -> SearchConfig {
    let mut config = SearchConfig::new(kind, seed);
    if let Some(max_iters) = settings.max_iters {
        config.max_iters = max_iters;
    }
    config.improve_iter = settings.improve_iter;
    config.children_cap = settings.children_cap;
    config.time_limit = settings.time_limit.map(Duration::from_secs_f64);
    config.target = lower_bound;
    config
}

/// Runs `settings.runs` seeded searches for every (instance, neighborhood)
/// pair and returns one record per run, ordered by instance, then
/// neighborhood, then seed. A bounds entry for an instance sets the stop
/// target to its lower bound and fills the record's relative error.
pub fn run_batch(
    instances: &[Instance],
    kinds: &[NeighborhoodKind],
    bounds: Option<&KnownBounds>,
    settings: &BatchSettings,
) -> Vec<RunRecord> {
    let mut tasks = Vec::new();
    for instance in instances {
        let lower_bound = bounds.and_then(|b| b.lower(instance.name()));
        for &kind in kinds {
            for i in 0..settings.runs {
                tasks.push(Task {
                    instance,
                    lower_bound,
                    config: run_config(kind, settings.base_seed + i, lower_bound, settings),
                });
            }
        }
    }
    let stats = execute(&tasks, settings.jobs);
    tasks
        .iter()
        .zip(stats)
        .map(|(task, stats)| RunRecord {
            instance: task.instance.name().to_string(),
            neighborhood: task.config.neighborhood,
            seed: task.config.seed,
            best: stats.best_makespan,
            time_to_best: if settings.no_times {
                0.0
            } else {
                stats.time_to_best.as_secs_f64()
            },
            iterations: stats.iterations,
            re_percent: task
                .lower_bound
                .filter(|&lb| lb > 0)
                .map(|lb| relative_error(stats.best_makespan, lb)),
        })
        .collect()
}

/// Executes the tasks, on the calling thread or across a worker pool. Results
/// come back in task order either way, so reports do not depend on thread
/// scheduling.
fn execute(tasks: &[Task<'_>], jobs: usize) -> Vec<SearchStats> {
    if jobs <= 1 || tasks.len() <= 1 {
        return tasks.iter().map(|t| run(t.instance, &t.config)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<SearchStats>>> =
        Mutex::new((0..tasks.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let stats = run(tasks[i].instance, &tasks[i].config);
                slots.lock().expect("worker panicked")[i] = Some(stats);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|slot| slot.expect("every task ran"))
        .collect()
}
