//! Instance model, benchmark file parsers, and known-bounds tables.

use std::collections::HashMap;

use thiserror::Error;

/// Flat operation identifier. Operations are numbered job by job, in route
/// order, so ids are stable across machine reorderings.
pub type OpId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance has no jobs")]
    NoJobs,
    #[error("instance has no machines")]
    NoMachines,
    #[error("job {job} has no operations")]
    EmptyJob { job: usize },
    #[error("job {job}, operation {pos}: machine {machine} out of range for {m} machines")]
    MachineOutOfRange {
        job: usize,
        pos: usize,
        machine: usize,
        m: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected a \"n m\" header")]
    BadHeader { line: usize },
    #[error("line {line}: cannot parse {token:?} as an integer")]
    BadToken { line: usize, token: String },
    #[error("line {line}: job line has {found} values, expected {expected} machine/duration pairs")]
    WrongPairCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: machine {machine} out of range for {m} machines")]
    MachineOutOfRange { line: usize, machine: i64, m: usize },
    #[error("line {line}: negative duration {value}")]
    NegativeDuration { line: usize, value: i64 },
    #[error("line {line}: input ends before all data is read")]
    UnexpectedEnd { line: usize },
    #[error("line {line}: expected \"name LB UB\"")]
    BadBoundsLine { line: usize },
    #[error("line {line}: lower bound {lb} exceeds upper bound {ub}")]
    BoundOrder { line: usize, lb: u32, ub: u32 },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("job {job} has {len} operations, expected {m}: only rectangular instances have this encoding")]
pub struct NonRectangular {
    pub job: usize,
    pub len: usize,
    pub m: usize,
}

/// A job-shop instance: `n` jobs, `m` machines, and one route per job.
/// Each route entry is `(machine, duration)`; durations may be zero (one
/// published benchmark instance contains a zero-length operation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    num_machines: usize,
    routes: Vec<Vec<(usize, u32)>>,
    op_job: Vec<usize>,
    op_pos: Vec<usize>,
    op_machine: Vec<usize>,
    op_duration: Vec<u32>,
    job_start: Vec<usize>,
    machine_ops: Vec<Vec<OpId>>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        num_machines: usize,
        routes: Vec<Vec<(usize, u32)>>,
    ) -> Result<Self, InstanceError> {
        if num_machines == 0 {
            return Err(InstanceError::NoMachines);
        }
        if routes.is_empty() {
            return Err(InstanceError::NoJobs);
        }
        let mut op_job = Vec::new();
        let mut op_pos = Vec::new();
        let mut op_machine = Vec::new();
        let mut op_duration = Vec::new();
        let mut job_start = Vec::with_capacity(routes.len() + 1);
        let mut machine_ops = vec![Vec::new(); num_machines];
        for (job, route) in routes.iter().enumerate() {
            if route.is_empty() {
                return Err(InstanceError::EmptyJob { job });
            }
            job_start.push(op_job.len());
            for (pos, &(machine, duration)) in route.iter().enumerate() {
                if machine >= num_machines {
                    return Err(InstanceError::MachineOutOfRange {
                        job,
                        pos,
                        machine,
                        m: num_machines,
                    });
                }
                machine_ops[machine].push(op_job.len());
                op_job.push(job);
                op_pos.push(pos);
                op_machine.push(machine);
                op_duration.push(duration);
            }
        }
        job_start.push(op_job.len());
        Ok(Instance {
            name: name.into(),
            num_machines,
            routes,
            op_job,
            op_pos,
            op_machine,
            op_duration,
            job_start,
            machine_ops,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_jobs(&self) -> usize {
        self.routes.len()
    }

    pub fn num_machines(&self) -> usize {
        self.num_machines
    }

    pub fn num_ops(&self) -> usize {
        self.op_job.len()
    }

    pub fn routes(&self) -> &[Vec<(usize, u32)>] {
        &self.routes
    }

    pub fn job_len(&self, job: usize) -> usize {
        self.routes[job].len()
    }

    pub fn op_id(&self, job: usize, pos: usize) -> OpId {
        debug_assert!(pos < self.job_len(job));
        self.job_start[job] + pos
    }

    pub fn op_job(&self, op: OpId) -> usize {
        self.op_job[op]
    }

    pub fn op_pos(&self, op: OpId) -> usize {
        self.op_pos[op]
    }

    pub fn op_machine(&self, op: OpId) -> usize {
        self.op_machine[op]
    }

    pub fn op_duration(&self, op: OpId) -> u32 {
        self.op_duration[op]
    }

    /// Route predecessor of `op` within its job, if any.
    pub fn job_pred(&self, op: OpId) -> Option<OpId> {
        (self.op_pos[op] > 0).then(|| op - 1)
    }

    /// Route successor of `op` within its job, if any.
    pub fn job_succ(&self, op: OpId) -> Option<OpId> {
        (self.op_pos[op] + 1 < self.job_len(self.op_job[op])).then(|| op + 1)
    }

    /// All operations processed on `machine`, in job order.
    pub fn ops_on_machine(&self, machine: usize) -> &[OpId] {
        &self.machine_ops[machine]
    }

    pub fn total_duration(&self) -> u32 {
        self.op_duration.iter().sum()
    }

    /// Display label like "O31": job 3, first operation (both 1-indexed).
    pub fn op_label(&self, op: OpId) -> String {
        format!("O{}{}", self.op_job[op] + 1, self.op_pos[op] + 1)
    }

    /// Display label like "M2" for machine index 1 (1-indexed).
    pub fn machine_label(&self, machine: usize) -> String {
        format!("M{}", machine + 1)
    }

    /// Standard benchmarks visit each machine exactly once per job. Instances
    /// that revisit a machine are accepted but reported here so callers can
    /// warn about them.
    pub fn machine_revisit_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        for (job, route) in self.routes.iter().enumerate() {
            let mut seen = vec![0usize; self.num_machines];
            for &(machine, _) in route {
                seen[machine] += 1;
            }
            for (machine, &count) in seen.iter().enumerate() {
                if count > 1 {
                    warnings.push(format!(
                        "job {} visits machine {} {} times",
                        job + 1,
                        machine + 1,
                        count
                    ));
                }
            }
        }
        warnings
    }
}

/// `max(longest job, most loaded machine)`; never exceeds the optimal makespan.
pub fn simple_lower_bound(instance: &Instance) -> u32 {
    let job_bound = instance
        .routes()
        .iter()
        .map(|route| route.iter().map(|&(_, d)| d).sum::<u32>())
        .max()
        .unwrap_or(0);
    let mut loads = vec![0u32; instance.num_machines()];
    for route in instance.routes() {
        for &(machine, duration) in route {
            loads[machine] += duration;
        }
    }
    job_bound.max(loads.into_iter().max().unwrap_or(0))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed))
        }
    })
}

fn parse_int(line: usize, token: &str) -> Result<i64, ParseError> {
    token.parse::<i64>().map_err(|_| ParseError::BadToken {
        line,
        token: token.to_string(),
    })
}

fn end_line(text: &str) -> usize {
    text.lines().count() + 1
}

/// Parse the per-job pair format: a "n m" header, then one line per job with
/// `m` whitespace-separated `machine duration` pairs, machines 0-indexed.
/// Lines starting with '#' and blank lines are skipped.
pub fn parse_orlib(text: &str) -> Result<Instance, ParseError> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or(ParseError::UnexpectedEnd { line: end_line(text) })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(ParseError::BadHeader { line: header_line });
    }
    let n = parse_int(header_line, tokens[0])?;
    let m = parse_int(header_line, tokens[1])?;
    if n < 1 || m < 1 {
        return Err(ParseError::BadHeader { line: header_line });
    }
    let (n, m) = (n as usize, m as usize);

    let mut routes = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, row) = lines
            .next()
            .ok_or(ParseError::UnexpectedEnd { line: end_line(text) })?;
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != 2 * m {
            return Err(ParseError::WrongPairCount {
                line,
                expected: m,
                found: tokens.len(),
            });
        }
        let mut route = Vec::with_capacity(m);
        for pair in tokens.chunks(2) {
            let machine = parse_int(line, pair[0])?;
            let duration = parse_int(line, pair[1])?;
            if machine < 0 || machine >= m as i64 {
                return Err(ParseError::MachineOutOfRange { line, machine, m });
            }
            if duration < 0 {
                return Err(ParseError::NegativeDuration {
                    line,
                    value: duration,
                });
            }
            route.push((machine as usize, duration as u32));
        }
        routes.push(route);
    }
    Ok(Instance::new(String::new(), m, routes)?)
}

/// Parse the matrix format: a "n m" header (optionally preceded by descriptor
/// lines, optionally carrying extra numbers), an n-by-m duration matrix, then
/// an n-by-m matrix of 1-indexed machine numbers. Lines containing any
/// non-integer token are treated as descriptors and skipped.
pub fn parse_taillard(text: &str) -> Result<Instance, ParseError> {
    let data_lines: Vec<(usize, Vec<i64>)> = content_lines(text)
        .filter_map(|(line, content)| {
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let ints: Option<Vec<i64>> = tokens.iter().map(|t| t.parse::<i64>().ok()).collect();
            ints.map(|ints| (line, ints))
        })
        .collect();

    let (header_line, header) = data_lines
        .first()
        .ok_or(ParseError::UnexpectedEnd { line: end_line(text) })?;
    if header.len() < 2 || header[0] < 1 || header[1] < 1 {
        return Err(ParseError::BadHeader { line: *header_line });
    }
    let (n, m) = (header[0] as usize, header[1] as usize);

    let mut values = Vec::with_capacity(2 * n * m);
    for (line, ints) in &data_lines[1..] {
        for &v in ints {
            values.push((*line, v));
        }
    }
    if values.len() < 2 * n * m {
        return Err(ParseError::UnexpectedEnd { line: end_line(text) });
    }

    let mut routes = vec![Vec::with_capacity(m); n];
    for job in 0..n {
        for pos in 0..m {
            let (line, duration) = values[job * m + pos];
            if duration < 0 {
                return Err(ParseError::NegativeDuration {
                    line,
                    value: duration,
                });
            }
            let (line, machine) = values[n * m + job * m + pos];
            if machine < 1 || machine > m as i64 {
                return Err(ParseError::MachineOutOfRange { line, machine, m });
            }
            routes[job].push((machine as usize - 1, duration as u32));
        }
    }
    Ok(Instance::new(String::new(), m, routes)?)
}

/// Serialize to the per-job pair format accepted by [`parse_orlib`].
pub fn to_orlib(instance: &Instance) -> String {
    let mut out = format!("{} {}\n", instance.num_jobs(), instance.num_machines());
    for route in instance.routes() {
        let row: Vec<String> = route
            .iter()
            .map(|&(machine, duration)| format!("{} {}", machine, duration))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Serialize to the matrix format accepted by [`parse_taillard`]. Only
/// rectangular instances (every job has exactly `m` operations) fit it.
pub fn to_taillard(instance: &Instance) -> Result<String, NonRectangular> {
    let m = instance.num_machines();
    for (job, route) in instance.routes().iter().enumerate() {
        if route.len() != m {
            return Err(NonRectangular {
                job,
                len: route.len(),
                m,
            });
        }
    }
    let mut out = format!("{} {}\n", instance.num_jobs(), m);
    for route in instance.routes() {
        let row: Vec<String> = route.iter().map(|&(_, d)| d.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    for route in instance.routes() {
        let row: Vec<String> = route.iter().map(|&(mk, _)| (mk + 1).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// The 3-job, 3-machine worked example used throughout the tests.
pub fn builtin_example() -> Instance {
    Instance::new(
        "example3x3",
        3,
        vec![
            vec![(0, 2), (1, 1), (2, 3)],
            vec![(0, 1), (2, 2), (1, 2)],
            vec![(1, 5), (0, 2), (2, 1)],
        ],
    )
    .expect("static example is valid")
}

/// Known lower/upper bounds per instance name, loaded from a text file with
/// one `name LB UB` line per instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnownBounds {
    entries: HashMap<String, (u32, u32)>,
}

impl KnownBounds {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut entries = HashMap::new();
        for (line, content) in content_lines(text) {
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(ParseError::BadBoundsLine { line });
            }
            let lb = parse_int(line, tokens[1])?;
            let ub = parse_int(line, tokens[2])?;
            if lb < 0 || ub < 0 {
                return Err(ParseError::BadBoundsLine { line });
            }
            let (lb, ub) = (lb as u32, ub as u32);
            if lb > ub {
                return Err(ParseError::BoundOrder { line, lb, ub });
            }
            entries.insert(tokens[0].to_string(), (lb, ub));
        }
        Ok(KnownBounds { entries })
    }

    pub fn insert(&mut self, name: impl Into<String>, lb: u32, ub: u32) {
        self.entries.insert(name.into(), (lb, ub));
    }

    pub fn get(&self, name: &str) -> Option<(u32, u32)> {
        self.entries.get(name).copied()
    }

    pub fn lower(&self, name: &str) -> Option<u32> {
        self.get(name).map(|(lb, _)| lb)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
