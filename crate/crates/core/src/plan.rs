//! Cross ranks and the classification of block starts into independent
//! merge subproblems.
//!
//! Both inputs are cut into `p` blocks. Each A block start `x_i` gets its low
//! rank in B (`a_cross[i]`), each B block start `y_j` its high rank in A
//! (`b_cross[j]`). Cross ranks never cross one another, so each block start,
//! together with the next one, determines a pair of segments (one from each
//! input) that can be merged on its own and written at
//! `segment_a.start + segment_b.start` in the output. The `2p` pairs tile the
//! output exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::error::Result;
use crate::partition::BlockPartition;
use crate::ranks::{rank_high_by, rank_low_by};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// The five ways a block start and its successor can relate to the blocks of
/// the opposite sequence. Described here for an A-side task at block `i`,
/// with `j` the B block holding `a_cross[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MergeCase {
    /// Both cross ranks coincide: the A block is copied as is.
    A,
    /// Both cross ranks fall in the same B block: the A block is merged with
    /// the B elements between them.
    B,
    /// The cross ranks span a B block boundary that is not the next cross
    /// rank: merge up to that boundary and its high rank in A.
    C,
    /// The next cross rank is exactly the next B block start: merge the whole
    /// A block with the rest of B block `j`.
    D,
    /// The cross rank is itself a B block start: copy the A elements before
    /// that start's high rank.
    E,
}

impl MergeCase {
    pub fn is_copy(self) -> bool {
        matches!(self, MergeCase::A | MergeCase::E)
    }

    pub fn letter(self) -> char {
        match self {
            MergeCase::A => 'a',
            MergeCase::B => 'b',
            MergeCase::C => 'c',
            MergeCase::D => 'd',
            MergeCase::E => 'e',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

impl fmt::Display for MergeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Low cross ranks of the A block starts in B and high cross ranks of the B
/// block starts in A, each with the trailing entry for the virtual block `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossRanks {
    pub a_cross: Vec<usize>,
    pub b_cross: Vec<usize>,
}

/// One independent subproblem of the merge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeTask {
    pub side: Side,
    pub case: MergeCase,
    pub a_range: Range<usize>,
    pub b_range: Range<usize>,
    pub out_offset: usize,
}

impl MergeTask {
    /// Number of output elements.
    pub fn len(&self) -> usize {
        self.a_range.len() + self.b_range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn out_range(&self) -> Range<usize> {
        self.out_offset..self.out_offset + self.len()
    }
}

/// Tab-separated `side case a_start a_end b_start b_end out_offset`.
impl fmt::Display for MergeTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.side,
            self.case,
            self.a_range.start,
            self.a_range.end,
            self.b_range.start,
            self.b_range.end,
            self.out_offset
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergePlan {
    pub a_blocks: BlockPartition,
    pub b_blocks: BlockPartition,
    pub cross: CrossRanks,
    /// A-side tasks for blocks `0..p`, then B-side tasks for blocks `0..p`.
    pub tasks: Vec<MergeTask>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PlanViolation {
    #[error("expected {expected} tasks, found {found}")]
    TaskCount { expected: usize, found: usize },
    #[error("task {task} writes at {offset}, expected {expected}")]
    Offset {
        task: usize,
        offset: usize,
        expected: usize,
    },
    #[error("output not tiled: gap or overlap at position {0}")]
    OutputTiling(usize),
    #[error("{side} input not partitioned: gap or overlap at position {at}")]
    InputPartition { side: Side, at: usize },
    #[error("task {task} has {len} elements, bound is {bound}")]
    TaskSize { task: usize, len: usize, bound: usize },
    #[error("task {task} {side} range {start}..{end} crosses a block boundary")]
    BlockContainment {
        task: usize,
        side: Side,
        start: usize,
        end: usize,
    },
    #[error("cross ranks are not monotone")]
    CrossRanksNotMonotone,
}

impl MergePlan {
    pub fn n(&self) -> usize {
        self.a_blocks.len()
    }

    pub fn m(&self) -> usize {
        self.b_blocks.len()
    }

    pub fn blocks(&self) -> usize {
        self.a_blocks.blocks()
    }

    pub fn a_tasks(&self) -> &[MergeTask] {
        &self.tasks[..self.blocks()]
    }

    pub fn b_tasks(&self) -> &[MergeTask] {
        &self.tasks[self.blocks()..]
    }

    /// Largest number of elements a single task may hold.
    pub fn task_size_bound(&self) -> usize {
        let p = self.blocks();
        self.n().div_ceil(p) + self.m().div_ceil(p)
    }

    /// One line per task in the tab-separated dump format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for task in &self.tasks {
            out.push_str(&task.to_string());
            out.push('\n');
        }
        out
    }

    /// Verifies the structural invariants: task count, offsets, output tiling,
    /// input partitioning, per-task size bound, block containment and
    /// monotone cross ranks.
    pub fn check(&self) -> Result<(), PlanViolation> {
        let p = self.blocks();
        let (n, m) = (self.n(), self.m());
        if self.tasks.len() != 2 * p {
            return Err(PlanViolation::TaskCount {
                expected: 2 * p,
                found: self.tasks.len(),
            });
        }
        let monotone = |v: &[usize]| v.windows(2).all(|w| w[0] <= w[1]);
        if !monotone(&self.cross.a_cross) || !monotone(&self.cross.b_cross) {
            return Err(PlanViolation::CrossRanksNotMonotone);
        }

        let bound = self.task_size_bound();
        for (t, task) in self.tasks.iter().enumerate() {
            let expected = task.a_range.start + task.b_range.start;
            if task.out_offset != expected {
                return Err(PlanViolation::Offset {
                    task: t,
                    offset: task.out_offset,
                    expected,
                });
            }
            if task.len() > bound {
                return Err(PlanViolation::TaskSize {
                    task: t,
                    len: task.len(),
                    bound,
                });
            }
            for (side, range, blocks) in [
                (Side::A, &task.a_range, &self.a_blocks),
                (Side::B, &task.b_range, &self.b_blocks),
            ] {
                if range.start > range.end || range.end > blocks.len() {
                    return Err(PlanViolation::BlockContainment {
                        task: t,
                        side,
                        start: range.start,
                        end: range.end,
                    });
                }
                if !range.is_empty()
                    && blocks.block_of_unchecked(range.start) != blocks.block_of_unchecked(range.end - 1)
                {
                    return Err(PlanViolation::BlockContainment {
                        task: t,
                        side,
                        start: range.start,
                        end: range.end,
                    });
                }
            }
        }

        tiles(self.tasks.iter().map(MergeTask::out_range), n + m).map_err(PlanViolation::OutputTiling)?;
        tiles(self.tasks.iter().map(|t| t.a_range.clone()), n)
            .map_err(|at| PlanViolation::InputPartition { side: Side::A, at })?;
        tiles(self.tasks.iter().map(|t| t.b_range.clone()), m)
            .map_err(|at| PlanViolation::InputPartition { side: Side::B, at })?;
        Ok(())
    }
}

/// Checks that the non-empty `ranges` exactly cover `0..len` without overlap.
/// On failure returns the first position that is uncovered or covered twice.
fn tiles(ranges: impl Iterator<Item = Range<usize>>, len: usize) -> Result<(), usize> {
    let mut spans: Vec<Range<usize>> = ranges.filter(|r| !r.is_empty()).collect();
    spans.sort_by_key(|r| r.start);
    let mut next = 0;
    for r in spans {
        if r.start != next {
            return Err(r.start.min(next));
        }
        next = r.end;
    }
    if next != len {
        return Err(next);
    }
    Ok(())
}

/// Low rank of the start of A block `i` in B; `m` for an empty trailing block
/// and for the virtual block `p`.
pub(crate) fn a_cross_rank<T, F>(a: &[T], b: &[T], a_blocks: &BlockPartition, i: usize, compare: &F) -> usize
where
    F: Fn(&T, &T) -> Ordering,
{
    let start = a_blocks.start(i);
    if start == a.len() {
        b.len()
    } else {
        rank_low_by(&a[start], b, compare)
    }
}

/// High rank of the start of B block `j` in A; `n` for an empty trailing block
/// and for the virtual block `p`.
pub(crate) fn b_cross_rank<T, F>(a: &[T], b: &[T], b_blocks: &BlockPartition, j: usize, compare: &F) -> usize
where
    F: Fn(&T, &T) -> Ordering,
{
    let start = b_blocks.start(j);
    if start == b.len() {
        a.len()
    } else {
        rank_high_by(&b[start], a, compare)
    }
}

/// Computes all `2p` cross ranks sequentially.
pub fn compute_cross_ranks_by<T, F>(
    a: &[T],
    b: &[T],
    a_blocks: &BlockPartition,
    b_blocks: &BlockPartition,
    compare: F,
) -> CrossRanks
where
    F: Fn(&T, &T) -> Ordering,
{
    assert_eq!(a_blocks.blocks(), b_blocks.blocks(), "partitions differ in block count");
    let p = a_blocks.blocks();
    CrossRanks {
        a_cross: (0..=p).map(|i| a_cross_rank(a, b, a_blocks, i, &compare)).collect(),
        b_cross: (0..=p).map(|j| b_cross_rank(a, b, b_blocks, j, &compare)).collect(),
    }
}

pub fn compute_cross_ranks<T: Ord>(
    a: &[T],
    b: &[T],
    a_blocks: &BlockPartition,
    b_blocks: &BlockPartition,
) -> CrossRanks {
    compute_cross_ranks_by(a, b, a_blocks, b_blocks, T::cmp)
}

/// Case analysis for the block `i` of the "own" sequence. Returns the case,
/// the segment of the own sequence and the segment of the other sequence.
fn classify(
    i: usize,
    own: &BlockPartition,
    other: &BlockPartition,
    own_cross: &[usize],
    other_cross: &[usize],
) -> (MergeCase, Range<usize>, Range<usize>) {
    let start = own.start(i);
    let end = own.start(i + 1);
    let lo = own_cross[i];
    let hi = own_cross[i + 1];

    if lo == hi {
        return (MergeCase::A, start..end, lo..lo);
    }
    let j = other.block_of_unchecked(lo);
    if lo == other.start(j) {
        // lo < hi <= len(other), so j < p and other_cross[j] is a real rank.
        debug_assert!(start < other_cross[j] && other_cross[j] <= end);
        return (MergeCase::E, start..other_cross[j], lo..lo);
    }
    if other.block_of_unchecked(hi) == j {
        return (MergeCase::B, start..end, lo..hi);
    }
    let next = other.start(j + 1);
    if hi == next {
        (MergeCase::D, start..end, lo..next)
    } else {
        // The next block start of `other` ranks inside this own block.
        debug_assert!(hi > next && other_cross[j + 1] <= end);
        (MergeCase::C, start..other_cross[j + 1], lo..next)
    }
}

pub fn classify_a_task(
    i: usize,
    a_blocks: &BlockPartition,
    b_blocks: &BlockPartition,
    cross: &CrossRanks,
) -> MergeTask {
    assert!(i < a_blocks.blocks(), "block {i} out of range");
    let (case, a_range, b_range) = classify(i, a_blocks, b_blocks, &cross.a_cross, &cross.b_cross);
    MergeTask {
        side: Side::A,
        case,
        out_offset: a_range.start + b_range.start,
        a_range,
        b_range,
    }
}

pub fn classify_b_task(
    j: usize,
    a_blocks: &BlockPartition,
    b_blocks: &BlockPartition,
    cross: &CrossRanks,
) -> MergeTask {
    assert!(j < b_blocks.blocks(), "block {j} out of range");
    let (case, b_range, a_range) = classify(j, b_blocks, a_blocks, &cross.b_cross, &cross.a_cross);
    MergeTask {
        side: Side::B,
        case,
        out_offset: a_range.start + b_range.start,
        a_range,
        b_range,
    }
}

impl MergePlan {
    /// Assembles the plan from precomputed cross ranks.
    pub fn from_cross_ranks(a_blocks: BlockPartition, b_blocks: BlockPartition, cross: CrossRanks) -> Self {
        let p = a_blocks.blocks();
        let mut tasks = Vec::with_capacity(2 * p);
        tasks.extend((0..p).map(|i| classify_a_task(i, &a_blocks, &b_blocks, &cross)));
        tasks.extend((0..p).map(|j| classify_b_task(j, &a_blocks, &b_blocks, &cross)));
        MergePlan {
            a_blocks,
            b_blocks,
            cross,
            tasks,
        }
    }
}

pub fn build_plan_by<T, F>(a: &[T], b: &[T], p: usize, compare: F) -> Result<MergePlan>
where
    F: Fn(&T, &T) -> Ordering,
{
    let a_blocks = BlockPartition::new(a.len(), p)?;
    let b_blocks = BlockPartition::new(b.len(), p)?;
    let cross = compute_cross_ranks_by(a, b, &a_blocks, &b_blocks, compare);
    Ok(MergePlan::from_cross_ranks(a_blocks, b_blocks, cross))
}

pub fn build_plan<T: Ord>(a: &[T], b: &[T], p: usize) -> Result<MergePlan> {
    build_plan_by(a, b, p, T::cmp)
}
