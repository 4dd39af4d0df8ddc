//! Stable parallel two-way merge and merge sort.
//!
//! Both inputs are cut into `p` nearly equal blocks. Each block start is
//! located in the opposite sequence by binary search: low rank for A starts,
//! high rank for B starts. These cross ranks split the merge into `2p`
//! independent subproblems whose outputs tile the result. On equal keys,
//! elements of A precede elements of B, so the merge is stable, and the only
//! synchronization is the wait for all ranks before the subproblems run.
//!
//! ```
//! use crossmerge::Executor;
//!
//! let ex = Executor::new(4).unwrap();
//! let merged = ex.merge(&[1, 3, 5, 7], &[2, 3, 6], 4).unwrap();
//! assert_eq!(merged, [1, 2, 3, 3, 5, 6, 7]);
//!
//! let mut v = vec![5, 1, 4, 1, 3];
//! ex.sort(&mut v, 4).unwrap();
//! assert_eq!(v, [1, 1, 3, 4, 5]);
//! ```

pub mod bench;
pub mod error;
pub mod executor;
pub mod item;
pub mod mergesort;
pub mod oracle;
pub mod partition;
pub mod plan;
pub mod ranks;

pub use error::{Error, Result};
pub use executor::{
    execute_plan_by, parallel_merge, parallel_merge_by, stable_merge_afirst, stable_merge_afirst_by, Executor,
    MergeTrace,
};
pub use item::{Item, Origin};
pub use mergesort::{parallel_merge_sort, parallel_merge_sort_by, RoundJob, RunSet, SortTrace};
pub use partition::{block_of, block_starts, BlockPartition};
pub use plan::{build_plan, build_plan_by, CrossRanks, MergeCase, MergePlan, MergeTask, PlanViolation, Side};
pub use ranks::{rank_high, rank_high_by, rank_low, rank_low_by};
