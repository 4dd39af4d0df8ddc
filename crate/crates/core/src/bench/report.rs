//! Benchmark report rows and their serialization.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Tsv,
}

/// One timed run. Counter fields come from an instrumented run on the same
/// input and are repeated on every row of a worker count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub command: String,
    pub dist: String,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub workers: usize,
    pub seed: u64,
    pub repeat: usize,
    pub wall_time_ns: u64,
    pub rank_phase_comparisons: u64,
    pub rank_phase_comparison_bound: u64,
    pub merge_phase_comparisons: u64,
    pub max_task_merge_comparisons: u64,
    pub merge_comparisons_per_worker: u64,
    pub task_size_total: usize,
    pub task_size_histogram: String,
    pub speedup_vs_workers_1: f64,
    pub verification_status: String,
}

/// Histogram over power-of-two buckets, written as `lo-hi:count` pairs joined
/// by `;`. Size 0 has its own bucket; empty buckets are omitted.
pub fn size_histogram(sizes: impl IntoIterator<Item = usize>) -> String {
    let mut counts: Vec<usize> = Vec::new();
    for size in sizes {
        let bucket = if size == 0 {
            0
        } else {
            (usize::BITS - size.leading_zeros()) as usize
        };
        if counts.len() <= bucket {
            counts.resize(bucket + 1, 0);
        }
        counts[bucket] += 1;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(bucket, c)| match bucket {
            0 => format!("0-0:{c}"),
            b => format!("{}-{}:{c}", 1usize << (b - 1), (1usize << b) - 1),
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Median of the samples (mean of the two middle ones for even counts).
pub fn median(samples: &[u64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut s = samples.to_vec();
    s.sort_unstable();
    let mid = s.len() / 2;
    if s.len() % 2 == 1 {
        s[mid] as f64
    } else {
        (s[mid - 1] as f64 + s[mid] as f64) / 2.0
    }
}

pub fn write_rows(rows: &[BenchRow], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)
        }
        Format::Csv | Format::Tsv => {
            let delimiter = if format == Format::Csv { b',' } else { b'\t' };
            let mut writer = csv::WriterBuilder::new()
                .delimiter(delimiter)
                .has_headers(false)
                .from_writer(out);
            writer.write_record(HEADER)?;
            for row in rows {
                writer.serialize(row)?;
            }
            writer.flush()
        }
    }
}

/// Column names, in struct order. Written explicitly so that an empty report
/// still has its header row.
pub const HEADER: [&str; 18] = [
    "command",
    "dist",
    "n",
    "m",
    "p",
    "workers",
    "seed",
    "repeat",
    "wall_time_ns",
    "rank_phase_comparisons",
    "rank_phase_comparison_bound",
    "merge_phase_comparisons",
    "max_task_merge_comparisons",
    "merge_comparisons_per_worker",
    "task_size_total",
    "task_size_histogram",
    "speedup_vs_workers_1",
    "verification_status",
];
