//! Execution of a merge plan on a worker pool.
//!
//! A merge runs in two phases. The first computes the `2p` cross ranks in
//! parallel and, once all of them are known, classifies the block starts into
//! tasks. The second runs every task on its own disjoint slice of the output.
//! The join at the end of the first phase is the only synchronization point;
//! task execution takes no locks.

use std::cmp::Ordering;
use std::mem::{ManuallyDrop, MaybeUninit};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::BlockPartition;
use crate::plan::{a_cross_rank, b_cross_rank, CrossRanks, MergePlan};

/// Counters collected by [`Executor::merge_traced_by`].
#[derive(Clone, Debug)]
pub struct MergeTrace {
    pub plan: MergePlan,
    /// Synchronization points between phases.
    pub barriers: usize,
    /// Comparisons made by the cross-rank searches.
    pub rank_comparisons: u64,
    /// Comparisons made by each task, in plan order.
    pub task_comparisons: Vec<u64>,
}

impl MergeTrace {
    pub fn merge_comparisons(&self) -> u64 {
        self.task_comparisons.iter().sum()
    }
}

/// Stable two-pointer merge of `a_seg` and `b_seg` into `out`. On equal keys
/// the element of `a_seg` goes first.
pub fn stable_merge_afirst_by<T, F>(a_seg: &[T], b_seg: &[T], out: &mut [T], compare: F) -> Result<()>
where
    T: Clone,
    F: Fn(&T, &T) -> Ordering,
{
    let expected = a_seg.len() + b_seg.len();
    if out.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: out.len(),
        });
    }
    merge_segments(a_seg, b_seg, out, &compare, &assign);
    Ok(())
}

pub fn stable_merge_afirst<T: Ord + Clone>(a_seg: &[T], b_seg: &[T], out: &mut [T]) -> Result<()> {
    stable_merge_afirst_by(a_seg, b_seg, out, T::cmp)
}

fn assign<T: Clone>(slot: &mut T, value: &T) {
    slot.clone_from(value);
}

fn init<T: Clone>(slot: &mut MaybeUninit<T>, value: &T) {
    slot.write(value.clone());
}

/// Merges into `out`, which must be exactly as long as both inputs together.
/// Returns the number of comparisons made.
pub(crate) fn merge_segments<T, S, F, P>(a: &[T], b: &[T], out: &mut [S], compare: &F, put: &P) -> u64
where
    F: Fn(&T, &T) -> Ordering,
    P: Fn(&mut S, &T),
{
    assert_eq!(out.len(), a.len() + b.len());
    let mut comparisons = 0;
    let (mut i, mut j) = (0, 0);
    let mut dst = out.iter_mut();
    while i < a.len() && j < b.len() {
        comparisons += 1;
        let slot = dst.next().unwrap();
        if compare(&a[i], &b[j]) != Ordering::Greater {
            put(slot, &a[i]);
            i += 1;
        } else {
            put(slot, &b[j]);
            j += 1;
        }
    }
    for (slot, value) in dst.zip(a[i..].iter().chain(&b[j..])) {
        put(slot, value);
    }
    comparisons
}

/// Result of one call to [`merge_core`].
pub(crate) struct CoreOutcome {
    pub plan: MergePlan,
    pub barriers: usize,
    pub task_comparisons: Vec<u64>,
}

/// Cross ranks computed concurrently, one rayon job per block start.
fn parallel_cross_ranks<T, F>(
    a: &[T],
    b: &[T],
    a_blocks: &BlockPartition,
    b_blocks: &BlockPartition,
    compare: &F,
) -> CrossRanks
where
    T: Sync,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    let p = a_blocks.blocks();
    let ranks: Vec<usize> = (0..2 * p)
        .into_par_iter()
        .with_max_len(1)
        .map(|k| {
            if k < p {
                a_cross_rank(a, b, a_blocks, k, compare)
            } else {
                b_cross_rank(a, b, b_blocks, k - p, compare)
            }
        })
        .collect();
    let (a_part, b_part) = ranks.split_at(p);
    let mut a_cross = a_part.to_vec();
    let mut b_cross = b_part.to_vec();
    a_cross.push(b.len());
    b_cross.push(a.len());
    CrossRanks { a_cross, b_cross }
}

/// Splits `out` into one slice per task. Fails unless the task outputs tile
/// `out` exactly.
fn split_output<'o, S>(plan: &MergePlan, out: &'o mut [S]) -> Result<Vec<(usize, &'o mut [S])>> {
    let mut order: Vec<usize> = (0..plan.tasks.len()).collect();
    order.sort_by_key(|&t| (plan.tasks[t].out_offset, plan.tasks[t].len()));
    let total = out.len();
    let mut rest = out;
    let mut cursor = 0;
    let mut jobs = Vec::with_capacity(order.len());
    for t in order {
        let task = &plan.tasks[t];
        let len = task.len();
        if task.out_offset != cursor || len > rest.len() {
            return Err(Error::InvalidPlan(format!(
                "task {t} writes {}..{} but the next free position is {cursor}",
                task.out_offset,
                task.out_offset + len
            )));
        }
        let (head, tail) = std::mem::take(&mut rest).split_at_mut(len);
        jobs.push((t, head));
        rest = tail;
        cursor += len;
    }
    if cursor != total {
        return Err(Error::InvalidPlan(format!("tasks cover {cursor} of {total} outputs")));
    }
    Ok(jobs)
}

/// Runs every task of `plan` on its own output slice. Must be called from
/// inside the pool.
fn run_tasks<T, S, F, P>(plan: &MergePlan, a: &[T], b: &[T], out: &mut [S], compare: &F, put: &P) -> Result<Vec<u64>>
where
    T: Sync,
    S: Send,
    F: Fn(&T, &T) -> Ordering + Sync,
    P: Fn(&mut S, &T) + Sync,
{
    let jobs = split_output(plan, out)?;
    let mut comparisons = vec![0; plan.tasks.len()];
    let counted: Vec<(usize, u64)> = jobs
        .into_par_iter()
        .with_max_len(1)
        .map(|(t, dst)| {
            let task = &plan.tasks[t];
            let a_seg = &a[task.a_range.clone()];
            let b_seg = &b[task.b_range.clone()];
            (t, merge_segments(a_seg, b_seg, dst, compare, put))
        })
        .collect();
    for (t, c) in counted {
        comparisons[t] = c;
    }
    Ok(comparisons)
}

/// Full merge of `a` and `b` into `out`, which must hold `a.len() + b.len()`
/// slots. Must be called from inside the pool.
pub(crate) fn merge_core<T, S, R, F, P>(
    a: &[T],
    b: &[T],
    p: usize,
    out: &mut [S],
    rank_compare: &R,
    compare: &F,
    put: &P,
) -> Result<CoreOutcome>
where
    T: Sync,
    S: Send,
    R: Fn(&T, &T) -> Ordering + Sync,
    F: Fn(&T, &T) -> Ordering + Sync,
    P: Fn(&mut S, &T) + Sync,
{
    check_out_len(a.len() + b.len(), out.len())?;
    let a_blocks = BlockPartition::new(a.len(), p)?;
    let b_blocks = BlockPartition::new(b.len(), p)?;

    let cross = parallel_cross_ranks(a, b, &a_blocks, &b_blocks, rank_compare);
    // Every rank is known past this point.
    let barriers = 1;

    let plan = MergePlan::from_cross_ranks(a_blocks, b_blocks, cross);
    let task_comparisons = run_tasks(&plan, a, b, out, compare, put)?;
    Ok(CoreOutcome {
        plan,
        barriers,
        task_comparisons,
    })
}

fn check_out_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

fn uninit_vec<T>(len: usize) -> Vec<MaybeUninit<T>> {
    let mut out = Vec::with_capacity(len);
    out.resize_with(len, MaybeUninit::uninit);
    out
}

/// # Safety
/// Every element of `v` must be initialized.
unsafe fn assume_init_vec<T>(v: Vec<MaybeUninit<T>>) -> Vec<T> {
    let mut v = ManuallyDrop::new(v);
    // SAFETY: MaybeUninit<T> has the layout of T and the caller guarantees
    // every element is initialized.
    unsafe { Vec::from_raw_parts(v.as_mut_ptr().cast::<T>(), v.len(), v.capacity()) }
}

/// A pool of worker threads that runs merges and sorts.
///
/// The partition width `p` of a merge is independent of the number of
/// workers. [`Executor::default_blocks`] returns `workers * oversubscription`,
/// which smooths out the up-to-twofold difference in task sizes.
pub struct Executor {
    pool: rayon::ThreadPool,
    workers: usize,
    oversubscription: usize,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers)
            .field("oversubscription", &self.oversubscription)
            .finish()
    }
}

impl Executor {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::ZeroWorkers);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("crossmerge-{i}"))
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        Ok(Executor {
            pool,
            workers,
            oversubscription: 1,
        })
    }

    /// Sets how many blocks per worker [`default_blocks`](Self::default_blocks) uses.
    pub fn with_oversubscription(mut self, factor: usize) -> Self {
        self.oversubscription = factor.max(1);
        self
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn oversubscription(&self) -> usize {
        self.oversubscription
    }

    pub fn default_blocks(&self) -> usize {
        self.workers * self.oversubscription
    }

    pub(crate) fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        self.pool.install(op)
    }

    /// Builds the plan with the cross-rank searches spread over the pool.
    pub fn build_plan_by<T, F>(&self, a: &[T], b: &[T], p: usize, compare: F) -> Result<MergePlan>
    where
        T: Sync,
        F: Fn(&T, &T) -> Ordering + Sync,
    {
        let a_blocks = BlockPartition::new(a.len(), p)?;
        let b_blocks = BlockPartition::new(b.len(), p)?;
        let cross = self.install(|| parallel_cross_ranks(a, b, &a_blocks, &b_blocks, &compare));
        Ok(MergePlan::from_cross_ranks(a_blocks, b_blocks, cross))
    }

    /// Runs a plan built for `a` and `b`, overwriting `out`.
    pub fn execute_plan_by<T, F>(&self, plan: &MergePlan, a: &[T], b: &[T], out: &mut [T], compare: F) -> Result<()>
    where
        T: Clone + Send + Sync,
        F: Fn(&T, &T) -> Ordering + Sync,
    {
        if plan.n() != a.len() || plan.m() != b.len() {
            return Err(Error::PlanMismatch {
                plan_n: plan.n(),
                plan_m: plan.m(),
                n: a.len(),
                m: b.len(),
            });
        }
        check_out_len(a.len() + b.len(), out.len())?;
        self.install(|| run_tasks(plan, a, b, out, &compare, &assign))?;
        Ok(())
    }

    /// Stable merge with `p` blocks per input.
    pub fn merge_by<T, F>(&self, a: &[T], b: &[T], p: usize, compare: F) -> Result<Vec<T>>
    where
        T: Clone + Send + Sync,
        F: Fn(&T, &T) -> Ordering + Sync,
    {
        self.merge_traced_by(a, b, p, compare).map(|(out, _)| out)
    }

    pub fn merge<T>(&self, a: &[T], b: &[T], p: usize) -> Result<Vec<T>>
    where
        T: Ord + Clone + Send + Sync,
    {
        self.merge_by(a, b, p, T::cmp)
    }

    /// Like [`merge_by`](Self::merge_by), also returning the plan and counters.
    pub fn merge_traced_by<T, F>(&self, a: &[T], b: &[T], p: usize, compare: F) -> Result<(Vec<T>, MergeTrace)>
    where
        T: Clone + Send + Sync,
        F: Fn(&T, &T) -> Ordering + Sync,
    {
        let rank_comparisons = AtomicU64::new(0);
        let rank_compare = |x: &T, y: &T| {
            rank_comparisons.fetch_add(1, AtomicOrdering::Relaxed);
            compare(x, y)
        };
        let mut out = uninit_vec::<T>(a.len() + b.len());
        let outcome = self.install(|| merge_core(a, b, p, &mut out, &rank_compare, &compare, &init))?;
        // SAFETY: merge_core succeeded, so the tasks tiled the output and each
        // one wrote every slot of its slice.
        let out = unsafe { assume_init_vec(out) };
        let trace = MergeTrace {
            plan: outcome.plan,
            barriers: outcome.barriers,
            rank_comparisons: rank_comparisons.into_inner(),
            task_comparisons: outcome.task_comparisons,
        };
        Ok((out, trace))
    }
}

/// Stable parallel merge on a fresh pool of `workers` threads.
pub fn parallel_merge_by<T, F>(a: &[T], b: &[T], p: usize, workers: usize, compare: F) -> Result<Vec<T>>
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    Executor::new(workers)?.merge_by(a, b, p, compare)
}

pub fn parallel_merge<T>(a: &[T], b: &[T], p: usize, workers: usize) -> Result<Vec<T>>
where
    T: Ord + Clone + Send + Sync,
{
    parallel_merge_by(a, b, p, workers, T::cmp)
}

/// Runs `plan` on a fresh pool of `workers` threads.
pub fn execute_plan_by<T, F>(
    plan: &MergePlan,
    a: &[T],
    b: &[T],
    out: &mut [T],
    workers: usize,
    compare: F,
) -> Result<()>
where
    T: Clone + Send + Sync,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    Executor::new(workers)?.execute_plan_by(plan, a, b, out, compare)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::item::{tag, Item, Origin};
    use crate::plan::build_plan_by;
    use std::cell::Cell;

    const A_FIG1: [u32; 18] = [0, 0, 1, 1, 1, 2, 2, 2, 4, 5, 5, 5, 5, 5, 6, 6, 7, 7];
    const B_FIG1: [u32; 15] = [1, 1, 3, 3, 3, 3, 4, 5, 6, 6, 6, 6, 7, 7, 7];
    const C_FIG1: [u32; 33] = [
        0, 0, 1, 1, 1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 5, 5, 5, 5, 5, 5, 6, 6, 6, 6, 6, 6, 7, 7, 7, 7, 7,
    ];

    fn it(key: u32, origin: Origin, idx: usize) -> Item<u32> {
        Item::new(key, origin, idx)
    }

    #[test]
    fn merge_segment_ties_go_to_a() {
        let a = tag([5u32, 5, 6], Origin::A);
        let b = tag([5u32], Origin::B);
        let mut out = vec![it(0, Origin::A, 0); 4];
        stable_merge_afirst_by(&a, &b, &mut out, Item::cmp_key).unwrap();
        assert_eq!(
            out,
            vec![
                it(5, Origin::A, 0),
                it(5, Origin::A, 1),
                it(5, Origin::B, 0),
                it(6, Origin::A, 2)
            ]
        );

        let a = tag([1u32, 1], Origin::A);
        let b = tag([1u32], Origin::B);
        let mut out = vec![it(0, Origin::A, 0); 3];
        stable_merge_afirst_by(&a, &b, &mut out, Item::cmp_key).unwrap();
        assert_eq!(out, vec![it(1, Origin::A, 0), it(1, Origin::A, 1), it(1, Origin::B, 0)]);
    }

    #[test]
    fn merge_segment_copy_and_mismatch() {
        let mut out = [0u32; 2];
        stable_merge_afirst(&[], &[2, 3], &mut out).unwrap();
        assert_eq!(out, [2, 3]);
        let mut short = [0u32; 1];
        assert_eq!(
            stable_merge_afirst(&[1], &[2], &mut short),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        );
    }

    #[test]
    fn merge_segment_comparison_bound() {
        for (a, b) in [
            (vec![1u32, 3, 5], vec![2u32, 4]),
            (vec![1, 1, 1], vec![1]),
            (vec![9], vec![1, 2, 3]),
        ] {
            let count = Cell::new(0usize);
            let mut out = vec![0; a.len() + b.len()];
            stable_merge_afirst_by(&a, &b, &mut out, |x, y| {
                count.set(count.get() + 1);
                x.cmp(y)
            })
            .unwrap();
            assert!(count.get() < a.len() + b.len());
        }
    }

    #[test]
    fn figure_one_merge() {
        let ex = Executor::new(2).unwrap();
        assert_eq!(ex.merge(&A_FIG1, &B_FIG1, 5).unwrap(), C_FIG1);
        let (_, trace) = ex.merge_traced_by(&A_FIG1, &B_FIG1, 5, u32::cmp).unwrap();
        assert_eq!(trace.barriers, 1);
        trace.plan.check().unwrap();
    }

    #[test]
    fn empty_and_single() {
        let ex = Executor::new(1).unwrap();
        let empty: [u32; 0] = [];
        assert!(ex.merge(&empty, &empty, 3).unwrap().is_empty());
        assert_eq!(ex.merge(&[7u32], &empty, 4).unwrap(), vec![7]);
    }

    #[test]
    fn invalid_configuration() {
        assert_eq!(Executor::new(0).unwrap_err(), Error::ZeroWorkers);
        let ex = Executor::new(1).unwrap();
        assert_eq!(ex.merge(&[1u32], &[2], 0), Err(Error::ZeroBlocks));
    }

    #[test]
    fn execute_prebuilt_plan() {
        let a = tag(A_FIG1, Origin::A);
        let b = tag(B_FIG1, Origin::B);
        let plan = build_plan_by(&a, &b, 5, Item::cmp_key).unwrap();
        let mut out1 = vec![it(0, Origin::A, 0); 33];
        let mut out8 = out1.clone();
        execute_plan_by(&plan, &a, &b, &mut out1, 1, Item::cmp_key).unwrap();
        execute_plan_by(&plan, &a, &b, &mut out8, 8, Item::cmp_key).unwrap();
        assert_eq!(out1, out8);
        assert_eq!(out1.iter().map(|x| x.key).collect::<Vec<_>>(), C_FIG1);

        assert!(matches!(
            execute_plan_by(&plan, &a[1..], &b, &mut out1[1..], 1, Item::cmp_key),
            Err(Error::PlanMismatch { .. })
        ));
        assert!(matches!(
            execute_plan_by(&plan, &a, &b, &mut out1[1..], 1, Item::cmp_key),
            Err(Error::LengthMismatch { .. })
        ));
        let mut broken = plan.clone();
        broken.tasks[0].out_offset = 1;
        assert!(matches!(
            execute_plan_by(&broken, &a, &b, &mut out1, 1, Item::cmp_key),
            Err(Error::InvalidPlan(_))
        ));
    }

    #[test]
    fn drop_types_are_handled() {
        let a: Vec<String> = ["a", "c", "e"].iter().map(|s| s.to_string()).collect();
        let b: Vec<String> = ["b", "d"].iter().map(|s| s.to_string()).collect();
        let out = parallel_merge(&a, &b, 2, 2).unwrap();
        assert_eq!(out, ["a", "b", "c", "d", "e"]);
    }
}
