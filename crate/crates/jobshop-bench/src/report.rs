//! Run records, relative-error aggregation, and CSV/Markdown report rendering.

use jobshop::{KnownBounds, NeighborhoodKind};
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

/// Column order shared by the CSV report and the Markdown run table.
pub const CSV_HEADER: &str = "instance,neighborhood,seed,best,time_to_best_s,iterations,re_percent";

/// Outcome of one seeded search on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub neighborhood: NeighborhoodKind,
    pub seed: u64,
    pub best: u32,
    /// Seconds until the best makespan was first reached.
    pub time_to_best: f64,
    pub iterations: u64,
    /// `100 * (best - LB) / LB`, present when a lower bound is known.
    pub re_percent: Option<f64>,
}

/// Relative error of a makespan against a lower bound, in percent.
pub fn relative_error(best: u32, lower_bound: u32) -> f64 {
    100.0 * (f64::from(best) - f64::from(lower_bound)) / f64::from(lower_bound)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MreError {
    #[error("no records to aggregate")]
    Empty,
    #[error("no bound entry for instance `{0}`")]
    MissingBound(String),
    #[error("lower bound for instance `{0}` is zero")]
    ZeroBound(String),
}

/// How the runs of one instance collapse into that instance's relative error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReAggregation {
    /// RE of the best makespan over the runs (the b-MRE column).
    BestOfRuns,
    /// Mean of the per-run REs (the av-MRE column).
    MeanOfRuns,
}

/// Mean relative error over the instances appearing in `records`.
///
/// Records are grouped by instance name; each group collapses to one relative
/// error per `agg`, and the result is the arithmetic mean of those values.
/// Every instance must have a bounds entry with a positive lower bound, and
/// an empty record set is an error rather than zero.
pub fn compute_mre(
    records: &[RunRecord],
    bounds: &KnownBounds,
    agg: ReAggregation,
) -> Result<f64, MreError> {
    if records.is_empty() {
        return Err(MreError::Empty);
    }
    let mut names: Vec<&str> = Vec::new();
    for record in records {
        if !names.contains(&record.instance.as_str()) {
            names.push(&record.instance);
        }
    }
    let mut total = 0.0;
    for name in &names {
        let lb = bounds
            .lower(name)
            .ok_or_else(|| MreError::MissingBound(name.to_string()))?;
        if lb == 0 {
            return Err(MreError::ZeroBound(name.to_string()));
        }
        let group: Vec<&RunRecord> = records.iter().filter(|r| r.instance == *name).collect();
        total += match agg {
            ReAggregation::BestOfRuns => {
                let best = group.iter().map(|r| r.best).min().expect("nonempty group");
                relative_error(best, lb)
            }
            ReAggregation::MeanOfRuns => {
                group.iter().map(|r| relative_error(r.best, lb)).sum::<f64>() / group.len() as f64
            }
        };
    }
    Ok(total / names.len() as f64)
}

/// Aggregate row over the runs of one (instance, neighborhood) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub instance: String,
    pub neighborhood: NeighborhoodKind,
    /// Minimum makespan over the runs.
    pub best: u32,
    /// Arithmetic mean makespan over the runs.
    pub mean_makespan: f64,
    /// Mean time-to-best over the runs, in seconds.
    pub mean_time_to_best: f64,
    /// RE of `best`, when a lower bound is known.
    pub best_re: Option<f64>,
    /// Mean of the per-run REs, when a lower bound is known.
    pub mean_re: Option<f64>,
}

/// Collapses the runs of one (instance, neighborhood) pair into a summary
/// row. Returns `None` for an empty slice.
pub fn summarize(records: &[RunRecord], lower_bound: Option<u32>) -> Option<Summary> {
    let first = records.first()?;
    debug_assert!(records
        .iter()
        .all(|r| r.instance == first.instance && r.neighborhood == first.neighborhood));
    let best = records.iter().map(|r| r.best).min()?;
    let count = records.len() as f64;
    let mean_makespan = records.iter().map(|r| f64::from(r.best)).sum::<f64>() / count;
    let mean_time_to_best = records.iter().map(|r| r.time_to_best).sum::<f64>() / count;
    let lb = lower_bound.filter(|&lb| lb > 0);
    Some(Summary {
        instance: first.instance.clone(),
        neighborhood: first.neighborhood,
        best,
        mean_makespan,
        mean_time_to_best,
        best_re: lb.map(|lb| relative_error(best, lb)),
        mean_re: lb.map(|lb| {
            records.iter().map(|r| relative_error(r.best, lb)).sum::<f64>() / count
        }),
    })
}

/// Aggregate row over a group of instances for one neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub label: String,
    pub neighborhood: NeighborhoodKind,
    pub best_mre: f64,
    pub mean_mre: f64,
    pub mean_time_to_best: f64,
}

/// Compact label for a run of instance names, e.g. `["la01", ..., "la05"]`
/// becomes `la01-05`. Falls back to `first-last` when the names do not share
/// an alphabetic prefix with trailing digits, and to the sole name for a
/// group of one.
pub fn group_label(names: &[&str]) -> String {
    match names {
        [] => String::new(),
        [only] => (*only).to_string(),
        [first, .., last] => {
            let split = |name: &str| {
                let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
                if digits == 0 {
                    None
                } else {
                    Some((name[..name.len() - digits].to_string(), name[name.len() - digits..].to_string()))
                }
            };
            if let (Some((p1, d1)), Some((p2, d2))) = (split(first), split(last)) {
                let same_prefix = p1 == p2
                    && names
                        .iter()
                        .all(|n| split(n).map_or(false, |(p, _)| p == p1));
                if same_prefix {
                    return format!("{p1}{d1}-{d2}");
                }
            }
            format!("{first}-{last}")
        }
    }
}

/// Report output format selected by `--emit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Csv,
    Md,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown report format `{0}`, expected csv or md")]
pub struct UnknownEmit(pub String);

impl FromStr for Emit {
    type Err = UnknownEmit;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Emit::Csv),
            "md" => Ok(Emit::Md),
            _ => Err(UnknownEmit(s.to_string())),
        }
    }
}

/// Host platform annotation included in every report, so absolute times are
/// read against the machine that produced them.
pub fn host_info() -> String {
    format!("{} {}", std::env::consts::OS, std::env::consts::ARCH)
}

fn fmt_opt_re(re: Option<f64>, empty: &str) -> String {
    re.map_or_else(|| empty.to_string(), |v| format!("{v:.4}"))
}

/// One CSV data row in [`CSV_HEADER`] order.
pub fn csv_record_line(record: &RunRecord) -> String {
    format!(
        "{},{},{},{},{:.3},{},{}",
        record.instance,
        record.neighborhood,
        record.seed,
        record.best,
        record.time_to_best,
        record.iterations,
        fmt_opt_re(record.re_percent, ""),
    )
}

/// Full CSV report: host and note comments, the header, one row per run, and
/// summary/group comment lines after the data.
pub fn csv_report(
    records: &[RunRecord],
    summaries: &[Summary],
    groups: &[GroupRow],
    notes: &[String],
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# host: {}", host_info());
    for note in notes {
        let _ = writeln!(out, "# note: {note}");
    }
    let _ = writeln!(out, "{CSV_HEADER}");
    for record in records {
        let _ = writeln!(out, "{}", csv_record_line(record));
    }
    for s in summaries {
        let _ = writeln!(
            out,
            "# summary: {} {} best={} m_av={:.2} t_av={:.3} b_re={} av_re={}",
            s.instance,
            s.neighborhood,
            s.best,
            s.mean_makespan,
            s.mean_time_to_best,
            fmt_opt_re(s.best_re, "-"),
            fmt_opt_re(s.mean_re, "-"),
        );
    }
    for g in groups {
        let _ = writeln!(
            out,
            "# group: {} {} b_mre={:.2} av_mre={:.2} t_av={:.2}",
            g.label, g.neighborhood, g.best_mre, g.mean_mre, g.mean_time_to_best,
        );
    }
    out
}

/// Full Markdown report: run table, summary table, and group table when
/// group rows are present.
pub fn md_report(
    title: &str,
    records: &[RunRecord],
    summaries: &[Summary],
    groups: &[GroupRow],
    notes: &[String],
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out);
    let _ = writeln!(out, "Host: {}", host_info());
    for note in notes {
        let _ = writeln!(out);
        let _ = writeln!(out, "Note: {note}");
    }
    if !records.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Runs");
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "| instance | neighborhood | seed | best | time_to_best_s | iterations | re_percent |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for r in records {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {:.3} | {} | {} |",
                r.instance,
                r.neighborhood,
                r.seed,
                r.best,
                r.time_to_best,
                r.iterations,
                fmt_opt_re(r.re_percent, "-"),
            );
        }
    }
    if !summaries.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Summary");
        let _ = writeln!(out);
        let _ = writeln!(out, "| instance | neighborhood | Best | M_av | T_av | b-RE | av-RE |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for s in summaries {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {:.2} | {:.3} | {} | {} |",
                s.instance,
                s.neighborhood,
                s.best,
                s.mean_makespan,
                s.mean_time_to_best,
                fmt_opt_re(s.best_re, "-"),
                fmt_opt_re(s.mean_re, "-"),
            );
        }
    }
    if !groups.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Groups");
        let _ = writeln!(out);
        let _ = writeln!(out, "| group | neighborhood | b-MRE | av-MRE | T_av |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for g in groups {
            let _ = writeln!(
                out,
                "| {} | {} | {:.2} | {:.2} | {:.2} |",
                g.label, g.neighborhood, g.best_mre, g.mean_mre, g.mean_time_to_best,
            );
        }
    }
    out
}
