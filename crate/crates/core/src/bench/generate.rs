//! Seeded input generators.
//!
//! All randomness comes from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Keys are derived from raw 64-bit
//! outputs by bit shifts only, so other implementations can reproduce them.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::partition::BlockPartition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    /// Keys in `[0, 2^32)`: top 32 bits of each draw.
    Uniform,
    /// Eight distinct keys `0..8`: top 3 bits of each draw.
    FewDuplicates,
    /// One key repeated: top 32 bits of the first draw.
    AllEqual,
    /// Up to eight ascending runs of uniform keys laid end to end.
    SortedRuns,
}

impl Distribution {
    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::FewDuplicates => "few-duplicates",
            Distribution::AllEqual => "all-equal",
            Distribution::SortedRuns => "sorted-runs",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Distribution as ValueEnum>::from_str(s, true)
    }
}

const SORTED_RUNS: usize = 8;

/// Keys in generation order, before sorting. This is the input of the `sort`
/// command.
pub fn generate_raw(dist: Distribution, len: usize, seed: u64) -> Vec<i64> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut draw = move || rng.next_u64();
    match dist {
        Distribution::Uniform => (0..len).map(|_| (draw() >> 32) as i64).collect(),
        Distribution::FewDuplicates => (0..len).map(|_| (draw() >> 61) as i64).collect(),
        Distribution::AllEqual => {
            let key = (draw() >> 32) as i64;
            vec![key; len]
        }
        Distribution::SortedRuns => {
            let mut keys: Vec<i64> = (0..len).map(|_| (draw() >> 32) as i64).collect();
            let runs = BlockPartition::new(len, SORTED_RUNS).expect("nonzero run count");
            for i in 0..runs.blocks() {
                keys[runs.block(i)].sort_unstable();
            }
            keys
        }
    }
}

/// A non-decreasing sequence: [`generate_raw`] sorted.
pub fn generate(dist: Distribution, len: usize, seed: u64) -> Vec<i64> {
    let mut keys = generate_raw(dist, len, seed);
    keys.sort_unstable();
    keys
}

/// Seed used for the second input of a merge.
pub fn second_seed(seed: u64) -> u64 {
    seed.wrapping_add(1)
}
