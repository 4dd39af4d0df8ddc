//! The `crossmerge` command line: merge, sort, verify, bench and demo-figure1.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use super::generate::{generate, generate_raw, second_seed, Distribution};
use super::report::{median, size_histogram, write_rows, BenchRow, Format};
use crate::executor::{Executor, MergeTrace};
use crate::item::{tag, Item, Origin};
use crate::oracle::{oracle_merge_by, oracle_sort_by};
use crate::ranks::comparison_budget;

#[derive(Debug, Parser)]
#[command(name = "crossmerge", version, about = "Stable parallel merge and merge sort harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Merge two sorted inputs.
    Merge,
    /// Sort one input.
    Sort,
    /// Check merge and sort against the reference implementations.
    Verify,
    /// Time merges or sorts over several worker counts.
    Bench {
        #[arg(value_enum, default_value = "merge")]
        target: BenchTarget,
    },
    /// Print the plan and output for the 18 + 15 element example with p = 5.
    #[command(name = "demo-figure1")]
    DemoFigure1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchTarget {
    Merge,
    Sort,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Length of the first input (or of the sort input).
    #[arg(long, global = true, default_value_t = 1000)]
    pub n: usize,
    /// Length of the second input.
    #[arg(long, global = true, default_value_t = 1000)]
    pub m: usize,
    /// Blocks per input; defaults to workers times the oversubscription factor.
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Worker threads. `bench` accepts a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    pub workers: Vec<usize>,
    /// Blocks per worker when --p is not given.
    #[arg(long, global = true, default_value_t = 1)]
    pub oversubscribe: usize,
    #[arg(long, global = true, value_enum, default_value = "uniform")]
    pub dist: Distribution,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// First input file (sorted for merge; any order for sort).
    #[arg(long = "in-a", global = true)]
    pub in_a: Option<PathBuf>,
    /// Second input file.
    #[arg(long = "in-b", global = true)]
    pub in_b: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the merge plan, one task per line.
    #[arg(long, global = true)]
    pub explain: bool,
    /// Read and write little-endian 8-byte keys instead of text lines.
    #[arg(long, global = true)]
    pub binary: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Malformed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Malformed(_) => 4,
        }
    }

    fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<crate::error::Error> for CliError {
    fn from(e: crate::error::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub const FIGURE1_A: [i64; 18] = [0, 0, 1, 1, 1, 2, 2, 2, 4, 5, 5, 5, 5, 5, 6, 6, 7, 7];
pub const FIGURE1_B: [i64; 15] = [1, 1, 3, 3, 3, 3, 4, 5, 6, 6, 6, 6, 7, 7, 7];

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Options {
    fn validate(&self) -> Result<(), CliError> {
        if self.p == Some(0) {
            return Err(CliError::Usage("--p must be at least 1".into()));
        }
        if self.workers.contains(&0) {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        if self.repeats == 0 {
            return Err(CliError::Usage("--repeats must be at least 1".into()));
        }
        if self.oversubscribe == 0 {
            return Err(CliError::Usage("--oversubscribe must be at least 1".into()));
        }
        Ok(())
    }

    fn single_workers(&self) -> Result<usize, CliError> {
        match self.workers.as_slice() {
            [] => Ok(default_workers()),
            [w] => Ok(*w),
            _ => Err(CliError::Usage("only `bench` accepts several --workers values".into())),
        }
    }

    fn executor(&self, workers: usize) -> Result<Executor, CliError> {
        Ok(Executor::new(workers)?.with_oversubscription(self.oversubscribe))
    }

    fn blocks(&self, ex: &Executor) -> usize {
        self.p.unwrap_or_else(|| ex.default_blocks())
    }

    /// Merge inputs: from files when given, generated otherwise.
    fn merge_inputs(&self) -> Result<(Vec<i64>, Vec<i64>), CliError> {
        let a = match &self.in_a {
            Some(path) => read_sorted(path, self.binary)?,
            None => generate(self.dist, self.n, self.seed),
        };
        let b = match &self.in_b {
            Some(path) => read_sorted(path, self.binary)?,
            None => generate(self.dist, self.m, second_seed(self.seed)),
        };
        Ok((a, b))
    }

    /// Sort input: the concatenated input files, or generated keys in raw order.
    fn sort_input(&self) -> Result<Vec<i64>, CliError> {
        if self.in_a.is_none() && self.in_b.is_none() {
            return Ok(generate_raw(self.dist, self.n, self.seed));
        }
        let mut keys = Vec::new();
        for path in self.in_a.iter().chain(&self.in_b) {
            keys.extend(read_keys(path, self.binary)?);
        }
        Ok(keys)
    }
}

pub fn read_keys(path: &Path, binary: bool) -> Result<Vec<i64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = BufReader::new(file);
    if binary {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes).map_err(|e| CliError::io(path, e))?;
        if bytes.len() % 8 != 0 {
            return Err(CliError::Malformed(format!(
                "{}: {} bytes is not a whole number of 8-byte keys",
                path.display(),
                bytes.len()
            )));
        }
        return Ok(bytes
            .chunks_exact(8)
            .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
            .collect());
    }
    let mut keys = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let key = text.parse::<i64>().map_err(|_| {
            CliError::Malformed(format!(
                "{}:{}: not an integer key: {text:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        keys.push(key);
    }
    Ok(keys)
}

fn read_sorted(path: &Path, binary: bool) -> Result<Vec<i64>, CliError> {
    let keys = read_keys(path, binary)?;
    if let Some(k) = keys.windows(2).position(|w| w[0] > w[1]) {
        return Err(CliError::Malformed(format!(
            "{}: keys decrease after position {k} ({} > {})",
            path.display(),
            keys[k],
            keys[k + 1]
        )));
    }
    Ok(keys)
}

pub fn write_keys(keys: impl Iterator<Item = i64>, binary: bool, out: &mut dyn Write) -> io::Result<()> {
    for key in keys {
        if binary {
            out.write_all(&key.to_le_bytes())?;
        } else {
            writeln!(out, "{key}")?;
        }
    }
    Ok(())
}

/// Runs `f` against the --out file or the given stdout.
fn with_output(
    opts: &Options,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match &opts.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
        }
        None => f(stdout).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn keys_of(items: &[Item<i64>]) -> impl Iterator<Item = i64> + '_ {
    items.iter().map(|it| it.key)
}

/// Upper bound on rank-phase comparisons: `2(p + 1)` searches, each within
/// the per-search budget for the longer input.
pub fn rank_comparison_bound(n: usize, m: usize, p: usize) -> u64 {
    (2 * (p + 1) * comparison_budget(n.max(m))) as u64
}

/// Everything wrong with a merge result, or `None` when it is correct.
pub fn merge_problems(a: &[Item<i64>], b: &[Item<i64>], out: &[Item<i64>], trace: &MergeTrace) -> Option<String> {
    let expected = oracle_merge_by(a, b, Item::cmp_key);
    if out != expected.as_slice() {
        let at = out
            .iter()
            .zip(&expected)
            .position(|(x, y)| x != y)
            .unwrap_or(out.len().min(expected.len()));
        return Some(format!("merge output differs from the reference at position {at}"));
    }
    if let Err(v) = trace.plan.check() {
        return Some(format!("plan invariant violated: {v}"));
    }
    if trace.barriers != 1 {
        return Some(format!("expected one synchronization point, saw {}", trace.barriers));
    }
    let bound = rank_comparison_bound(a.len(), b.len(), trace.plan.blocks());
    if trace.rank_comparisons > bound {
        return Some(format!(
            "{} rank comparisons exceed the bound {bound}",
            trace.rank_comparisons
        ));
    }
    for (task, &c) in trace.plan.tasks.iter().zip(&trace.task_comparisons) {
        if c as usize > task.len() {
            return Some(format!("task {task} made {c} comparisons"));
        }
    }
    None
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let opts = &cli.opts;
    opts.validate()?;
    match &cli.command {
        Command::Merge => cmd_merge(opts, stdout),
        Command::Sort => cmd_sort(opts, stdout),
        Command::Verify => cmd_verify(opts, stdout),
        Command::Bench { target } => {
            let rows = match target {
                BenchTarget::Merge => bench_merge(opts)?,
                BenchTarget::Sort => bench_sort(opts)?,
            };
            with_output(opts, stdout, |w| write_rows(&rows, opts.format, w))?;
            if let Some(bad) = rows.iter().find(|r| r.verification_status != "ok") {
                return Err(CliError::Mismatch(format!(
                    "{} with {} workers: {}",
                    bad.command, bad.workers, bad.verification_status
                )));
            }
            Ok(())
        }
        Command::DemoFigure1 => cmd_demo(stdout),
    }
}

fn cmd_merge(opts: &Options, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (a, b) = opts.merge_inputs()?;
    let ex = opts.executor(opts.single_workers()?)?;
    let p = opts.blocks(&ex);
    let (out, trace) = ex.merge_traced_by(&a, &b, p, i64::cmp)?;
    if opts.explain {
        stdout.write_all(trace.plan.dump().as_bytes()).map_err(stdout_err)?;
    }
    with_output(opts, stdout, |w| write_keys(out.iter().copied(), opts.binary, w))
}

fn cmd_sort(opts: &Options, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut keys = opts.sort_input()?;
    let ex = opts.executor(opts.single_workers()?)?;
    let p = opts.blocks(&ex);
    ex.sort(&mut keys, p)?;
    with_output(opts, stdout, |w| write_keys(keys.iter().copied(), opts.binary, w))
}

fn cmd_verify(opts: &Options, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (a, b) = opts.merge_inputs()?;
    let workers = opts.single_workers()?;
    let ex = opts.executor(workers)?;
    let p = opts.blocks(&ex);
    let a = tag(a, Origin::A);
    let b = tag(b, Origin::B);
    let (out, trace) = ex.merge_traced_by(&a, &b, p, Item::cmp_key)?;
    if opts.explain {
        stdout.write_all(trace.plan.dump().as_bytes()).map_err(stdout_err)?;
    }
    if let Some(problem) = merge_problems(&a, &b, &out, &trace) {
        return Err(CliError::Mismatch(problem));
    }
    writeln!(stdout, "merge ok: n={} m={} p={p} workers={workers}", a.len(), b.len()).map_err(stdout_err)?;

    let raw = tag(opts.sort_input()?, Origin::A);
    let mut sorted = raw.clone();
    ex.sort_by(&mut sorted, p, Item::cmp_key)?;
    if sorted != oracle_sort_by(&raw, Item::cmp_key) {
        return Err(CliError::Mismatch("sort output differs from the reference".into()));
    }
    writeln!(stdout, "sort ok: n={} p={p} workers={workers}", raw.len()).map_err(stdout_err)?;
    if opts.out.is_some() {
        with_output(opts, stdout, |w| write_keys(keys_of(&out), opts.binary, w))?;
    }
    Ok(())
}

fn cmd_demo(stdout: &mut dyn Write) -> Result<(), CliError> {
    let a = tag(FIGURE1_A, Origin::A);
    let b = tag(FIGURE1_B, Origin::B);
    let ex = Executor::new(1)?;
    let (out, trace) = ex.merge_traced_by(&a, &b, 5, Item::cmp_key)?;
    let merged: Vec<String> = out.iter().map(ToString::to_string).collect();
    write!(stdout, "{}\n{}\n", trace.plan.dump(), merged.join(" ")).map_err(stdout_err)
}

/// Worker counts to bench: 1 first as the baseline, then the requested ones.
fn bench_workers(opts: &Options) -> Vec<usize> {
    let requested = if opts.workers.is_empty() {
        vec![default_workers()]
    } else {
        opts.workers.clone()
    };
    let mut list = vec![1];
    for w in requested {
        if !list.contains(&w) {
            list.push(w);
        }
    }
    list
}

fn with_speedups(mut rows: Vec<BenchRow>) -> Vec<BenchRow> {
    let median_for = |w: usize, rows: &[BenchRow]| {
        let t: Vec<u64> = rows.iter().filter(|r| r.workers == w).map(|r| r.wall_time_ns).collect();
        median(&t)
    };
    let base = median_for(1, &rows);
    let medians: Vec<(usize, f64)> = rows.iter().map(|r| (r.workers, median_for(r.workers, &rows))).collect();
    for (row, (_, med)) in rows.iter_mut().zip(medians) {
        row.speedup_vs_workers_1 = if med > 0.0 { base / med } else { 0.0 };
    }
    rows
}

pub fn bench_merge(opts: &Options) -> Result<Vec<BenchRow>, CliError> {
    let (a, b) = opts.merge_inputs()?;
    let a = tag(a, Origin::A);
    let b = tag(b, Origin::B);
    let mut rows = Vec::new();
    for workers in bench_workers(opts) {
        let ex = opts.executor(workers)?;
        let p = opts.blocks(&ex);
        let mut times = Vec::with_capacity(opts.repeats);
        for _ in 0..opts.repeats {
            let start = Instant::now();
            let out = ex.merge_by(&a, &b, p, Item::cmp_key)?;
            times.push(start.elapsed().as_nanos() as u64);
            drop(out);
        }
        let (out, trace) = ex.merge_traced_by(&a, &b, p, Item::cmp_key)?;
        let status = merge_problems(&a, &b, &out, &trace).unwrap_or_else(|| "ok".into());
        let merge_total = trace.merge_comparisons();
        for (repeat, wall) in times.into_iter().enumerate() {
            rows.push(BenchRow {
                command: "merge".into(),
                dist: opts.dist.to_string(),
                n: a.len(),
                m: b.len(),
                p,
                workers,
                seed: opts.seed,
                repeat,
                wall_time_ns: wall,
                rank_phase_comparisons: trace.rank_comparisons,
                rank_phase_comparison_bound: rank_comparison_bound(a.len(), b.len(), p),
                merge_phase_comparisons: merge_total,
                max_task_merge_comparisons: trace.task_comparisons.iter().copied().max().unwrap_or(0),
                merge_comparisons_per_worker: merge_total.div_ceil(workers as u64),
                task_size_total: trace.plan.tasks.iter().map(|t| t.len()).sum(),
                task_size_histogram: size_histogram(trace.plan.tasks.iter().map(|t| t.len())),
                speedup_vs_workers_1: 0.0,
                verification_status: status.clone(),
            });
        }
    }
    Ok(with_speedups(rows))
}

pub fn bench_sort(opts: &Options) -> Result<Vec<BenchRow>, CliError> {
    let raw = tag(opts.sort_input()?, Origin::A);
    let expected = oracle_sort_by(&raw, Item::cmp_key);
    let mut rows = Vec::new();
    for workers in bench_workers(opts) {
        let ex = opts.executor(workers)?;
        let p = opts.blocks(&ex);
        let mut times = Vec::with_capacity(opts.repeats);
        for _ in 0..opts.repeats {
            let mut v = raw.clone();
            let start = Instant::now();
            ex.sort_by(&mut v, p, Item::cmp_key)?;
            times.push(start.elapsed().as_nanos() as u64);
        }
        let comparisons = AtomicU64::new(0);
        let mut v = raw.clone();
        ex.sort_by(&mut v, p, |x: &Item<i64>, y: &Item<i64>| {
            comparisons.fetch_add(1, AtomicOrdering::Relaxed);
            x.key.cmp(&y.key)
        })?;
        let status = if v == expected {
            "ok".to_string()
        } else {
            "sort output differs from the reference".into()
        };
        let total = comparisons.into_inner();
        let blocks = crate::partition::BlockPartition::new(raw.len(), p)?;
        let sizes: Vec<usize> = (0..p).map(|i| blocks.block(i).len()).collect();
        for (repeat, wall) in times.into_iter().enumerate() {
            rows.push(BenchRow {
                command: "sort".into(),
                dist: opts.dist.to_string(),
                n: raw.len(),
                m: 0,
                p,
                workers,
                seed: opts.seed,
                repeat,
                wall_time_ns: wall,
                rank_phase_comparisons: 0,
                rank_phase_comparison_bound: 0,
                merge_phase_comparisons: total,
                max_task_merge_comparisons: 0,
                merge_comparisons_per_worker: total.div_ceil(workers as u64),
                task_size_total: sizes.iter().sum(),
                task_size_histogram: size_histogram(sizes.iter().copied()),
                speedup_vs_workers_1: 0.0,
                verification_status: status.clone(),
            });
        }
    }
    Ok(with_speedups(rows))
}
