//! Stable parallel merge sort.
//!
//! The input is cut into `p` blocks that are sorted independently, then the
//! sorted runs are merged pairwise in `ceil(log2 p)` rounds. All pairs of a
//! round are merged concurrently, and each pair merge is itself parallel with
//! a block count proportional to its share of the input. Rounds alternate
//! between the input slice and one auxiliary buffer of the same length.

use std::cmp::Ordering;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::executor::{merge_core, Executor};
use crate::partition::BlockPartition;

/// One unit of work in a merge round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundJob {
    /// Merge two adjacent runs; the left one wins ties.
    Merge(Range<usize>, Range<usize>),
    /// Trailing odd run, copied unchanged.
    Carry(Range<usize>),
}

impl RoundJob {
    pub fn span(&self) -> Range<usize> {
        match self {
            RoundJob::Merge(l, r) => l.start..r.end,
            RoundJob::Carry(c) => c.clone(),
        }
    }
}

/// Sorted runs tiling the working array, plus the number of rounds done.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSet {
    pub runs: Vec<Range<usize>>,
    pub round: usize,
}

impl RunSet {
    pub fn new(runs: Vec<Range<usize>>) -> Self {
        assert!(!runs.is_empty(), "a run set needs at least one run");
        debug_assert!(runs.windows(2).all(|w| w[0].end == w[1].start));
        RunSet { runs, round: 0 }
    }

    pub fn from_blocks(blocks: &BlockPartition) -> Self {
        RunSet::new((0..blocks.blocks()).map(|i| blocks.block(i)).collect())
    }

    pub fn is_done(&self) -> bool {
        self.runs.len() == 1
    }

    /// Jobs for the next round: pairs (0,1), (2,3), ... and a carry for an odd
    /// trailing run.
    pub fn round_pairs(&self) -> Vec<RoundJob> {
        if self.is_done() {
            return Vec::new();
        }
        self.runs
            .chunks(2)
            .map(|pair| match pair {
                [l, r] => RoundJob::Merge(l.clone(), r.clone()),
                [c] => RoundJob::Carry(c.clone()),
                _ => unreachable!(),
            })
            .collect()
    }

    /// The run set after the jobs of [`round_pairs`](Self::round_pairs) ran.
    pub fn advance(&self) -> RunSet {
        RunSet {
            runs: self.round_pairs().iter().map(RoundJob::span).collect(),
            round: self.round + 1,
        }
    }
}

/// Counters collected by [`Executor::sort_traced_by`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortTrace {
    pub rounds: usize,
    /// Runs left after each round.
    pub runs_per_round: Vec<usize>,
    /// Pair merges per round.
    pub merges_per_round: Vec<usize>,
    /// Synchronization points inside pair merges, summed over all of them.
    pub merge_barriers: usize,
}

/// Block count for one pair merge: the pair's share of the workers, at least
/// one, times the oversubscription factor.
fn pair_blocks(pair_len: usize, total: usize, workers: usize, oversubscription: usize) -> usize {
    let share = (workers * pair_len + total / 2).checked_div(total).unwrap_or(1);
    share.max(1) * oversubscription
}

fn round_on<T, F>(
    jobs: &[RoundJob],
    src: &[T],
    dst: &mut [T],
    workers: usize,
    oversubscription: usize,
    compare: &F,
) -> Result<usize>
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    let total = src.len();
    let mut rest = dst;
    let mut parts = Vec::with_capacity(jobs.len());
    for job in jobs {
        let (head, tail) = std::mem::take(&mut rest).split_at_mut(job.span().len());
        parts.push((job, head));
        rest = tail;
    }
    let barriers: Result<Vec<usize>> = parts
        .into_par_iter()
        .with_max_len(1)
        .map(|(job, out)| match job {
            RoundJob::Merge(l, r) => {
                let width = pair_blocks(out.len(), total, workers, oversubscription);
                let put = |slot: &mut T, v: &T| slot.clone_from(v);
                merge_core(&src[l.clone()], &src[r.clone()], width, out, compare, compare, &put).map(|o| o.barriers)
            }
            RoundJob::Carry(c) => {
                out.clone_from_slice(&src[c.clone()]);
                Ok(0)
            }
        })
        .collect();
    Ok(barriers?.into_iter().sum())
}

impl Executor {
    /// Stable sort of `v` with `p` initial blocks.
    pub fn sort_by<T, F>(&self, v: &mut [T], p: usize, compare: F) -> Result<()>
    where
        T: Clone + Send + Sync,
        F: Fn(&T, &T) -> Ordering + Sync,
    {
        self.sort_traced_by(v, p, compare).map(|_| ())
    }

    pub fn sort<T>(&self, v: &mut [T], p: usize) -> Result<()>
    where
        T: Ord + Clone + Send + Sync,
    {
        self.sort_by(v, p, T::cmp)
    }

    pub fn sort_traced_by<T, F>(&self, v: &mut [T], p: usize, compare: F) -> Result<SortTrace>
    where
        T: Clone + Send + Sync,
        F: Fn(&T, &T) -> Ordering + Sync,
    {
        let blocks = BlockPartition::new(v.len(), p)?;
        let workers = self.workers();
        let oversubscription = self.oversubscription();
        self.install(|| {
            let mut trace = SortTrace::default();
            sort_blocks(v, &blocks, &compare);

            let mut runs = RunSet::from_blocks(&blocks);
            if runs.is_done() {
                return Ok(trace);
            }
            let mut aux: Vec<T> = v.par_iter().cloned().collect();
            let mut in_aux = false;
            while !runs.is_done() {
                let jobs = runs.round_pairs();
                let barriers = if in_aux {
                    round_on(&jobs, &aux, v, workers, oversubscription, &compare)?
                } else {
                    round_on(&jobs, v, &mut aux, workers, oversubscription, &compare)?
                };
                in_aux = !in_aux;
                runs = runs.advance();
                trace.rounds += 1;
                trace.runs_per_round.push(runs.runs.len());
                trace
                    .merges_per_round
                    .push(jobs.iter().filter(|j| matches!(j, RoundJob::Merge(..))).count());
                trace.merge_barriers += barriers;
            }
            if in_aux {
                v.par_iter_mut().zip(aux.par_iter()).for_each(|(d, s)| d.clone_from(s));
            }
            Ok(trace)
        })
    }
}

fn sort_blocks<T, F>(v: &mut [T], blocks: &BlockPartition, compare: &F)
where
    T: Send,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    let mut rest = v;
    let mut pieces = Vec::with_capacity(blocks.blocks());
    for i in 0..blocks.blocks() {
        let (head, tail) = std::mem::take(&mut rest).split_at_mut(blocks.block(i).len());
        pieces.push(head);
        rest = tail;
    }
    pieces
        .into_par_iter()
        .with_max_len(1)
        .for_each(|piece| piece.sort_by(compare));
}

/// Stable parallel merge sort on a fresh pool of `workers` threads.
pub fn parallel_merge_sort_by<T, F>(v: &mut [T], p: usize, workers: usize, compare: F) -> Result<()>
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    if workers == 0 {
        return Err(Error::ZeroWorkers);
    }
    Executor::new(workers)?.sort_by(v, p, compare)
}

pub fn parallel_merge_sort<T>(v: &mut [T], p: usize, workers: usize) -> Result<()>
where
    T: Ord + Clone + Send + Sync,
{
    parallel_merge_sort_by(v, p, workers, T::cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::item::{tag, Item, Origin};

    fn runs(n: usize) -> RunSet {
        RunSet::new((0..n).map(|i| i..i + 1).collect())
    }

    #[test]
    fn five_runs_take_three_rounds() {
        let r0 = runs(5);
        assert_eq!(
            r0.round_pairs(),
            vec![
                RoundJob::Merge(0..1, 1..2),
                RoundJob::Merge(2..3, 3..4),
                RoundJob::Carry(4..5)
            ]
        );
        let r1 = r0.advance();
        assert_eq!(r1.runs, vec![0..2, 2..4, 4..5]);
        assert_eq!(
            r1.round_pairs(),
            vec![RoundJob::Merge(0..2, 2..4), RoundJob::Carry(4..5)]
        );
        let r2 = r1.advance();
        assert_eq!(r2.round_pairs(), vec![RoundJob::Merge(0..4, 4..5)]);
        let r3 = r2.advance();
        assert!(r3.is_done());
        assert_eq!(r3.round, 3);
    }

    #[test]
    fn power_of_two_and_single() {
        assert!(runs(1).round_pairs().is_empty());
        let r = runs(4);
        assert_eq!(
            r.round_pairs(),
            vec![RoundJob::Merge(0..1, 1..2), RoundJob::Merge(2..3, 3..4)]
        );
        assert!(r.advance().advance().is_done());
    }

    #[test]
    fn small_sorts() {
        let mut v = vec![3u32, 1, 2];
        parallel_merge_sort(&mut v, 2, 2).unwrap();
        assert_eq!(v, [1, 2, 3]);

        let mut empty: Vec<u32> = vec![];
        parallel_merge_sort(&mut empty, 4, 1).unwrap();
        assert!(empty.is_empty());
        assert_eq!(parallel_merge_sort(&mut v, 0, 1), Err(Error::ZeroBlocks));
        assert_eq!(parallel_merge_sort(&mut v, 1, 0), Err(Error::ZeroWorkers));
    }

    #[test]
    fn sorted_input_is_unchanged() {
        let items = tag((0..50u32).map(|k| k / 4), Origin::A);
        let ex = Executor::new(3).unwrap();
        for p in 1..=9 {
            let mut v = items.clone();
            ex.sort_by(&mut v, p, Item::cmp_key).unwrap();
            assert_eq!(v, items);
        }
    }

    #[test]
    fn round_count() {
        let ex = Executor::new(2).unwrap();
        for p in 1..=17usize {
            let mut v: Vec<u32> = (0..100).rev().collect();
            let trace = ex.sort_traced_by(&mut v, p, u32::cmp).unwrap();
            assert_eq!(trace.rounds, crate::ranks::ceil_log2(p), "p={p}");
            assert!(v.windows(2).all(|w| w[0] <= w[1]));
            for (k, runs) in trace.runs_per_round.iter().enumerate() {
                assert!(*runs <= p.div_ceil(1 << (k + 1)));
            }
            assert_eq!(trace.merge_barriers, trace.merges_per_round.iter().sum::<usize>());
        }
    }

    #[test]
    fn pair_block_shares() {
        assert_eq!(pair_blocks(50, 100, 4, 1), 2);
        assert_eq!(pair_blocks(1, 100, 4, 1), 1);
        assert_eq!(pair_blocks(100, 100, 4, 2), 8);
        assert_eq!(pair_blocks(0, 0, 4, 1), 1);
    }
}
