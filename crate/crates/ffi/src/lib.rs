//! C ABI for `crossmerge`.
//!
//! Executors and plans are opaque handles created and freed through this
//! interface. Every fallible call returns a [`CmStatus`]; results are written
//! through caller-provided pointers. Keys are `int64_t`. A data pointer may be
//! NULL only when its length is 0.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use crossmerge::{Executor, Item, MergeCase, MergePlan, Origin, Side};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsortedInput = 3,
    OutOfRange = 4,
    PoolFailure = 5,
    Panic = 6,
}

/// Worker pool handle.
pub struct CmExecutor {
    inner: Executor,
}

/// Merge plan handle.
pub struct CmPlan {
    inner: MergePlan,
}

/// One merge subproblem. `side` is 0 for an A-side task and 1 for a B-side
/// task; `case_letter` is one of `'a'` to `'e'`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CmTask {
    pub side: u8,
    pub case_letter: u8,
    pub a_start: usize,
    pub a_end: usize,
    pub b_start: usize,
    pub b_end: usize,
    pub out_offset: usize,
}

fn status_of(e: &crossmerge::Error) -> CmStatus {
    use crossmerge::Error::*;
    match e {
        ZeroBlocks | ZeroWorkers | LengthMismatch { .. } | PlanMismatch { .. } | InvalidPlan(_) => {
            CmStatus::InvalidArgument
        }
        IndexOutOfRange { .. } => CmStatus::OutOfRange,
        ThreadPool(_) => CmStatus::PoolFailure,
    }
}

fn guard(f: impl FnOnce() -> CmStatus) -> CmStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(CmStatus::Panic)
}

/// # Safety
/// `data` must be NULL with `len == 0`, or point to `len` readable elements.
unsafe fn input<'a, T>(data: *const T, len: usize) -> Result<&'a [T], CmStatus> {
    if len == 0 {
        Ok(&[])
    } else if data.is_null() {
        Err(CmStatus::NullPointer)
    } else {
        // SAFETY: non-null and valid for `len` reads per the caller contract.
        Ok(unsafe { std::slice::from_raw_parts(data, len) })
    }
}

/// # Safety
/// `data` must be NULL with `len == 0`, or point to `len` writable elements.
unsafe fn output<'a, T>(data: *mut T, len: usize) -> Result<&'a mut [T], CmStatus> {
    if len == 0 {
        Ok(&mut [])
    } else if data.is_null() {
        Err(CmStatus::NullPointer)
    } else {
        // SAFETY: non-null and valid for `len` writes per the caller contract.
        Ok(unsafe { std::slice::from_raw_parts_mut(data, len) })
    }
}

/// Like [`output`], but a NULL pointer means "not requested".
unsafe fn optional_output<'a, T>(data: *mut T, len: usize) -> Option<&'a mut [T]> {
    if data.is_null() {
        None
    } else {
        // SAFETY: non-null and valid for `len` writes per the caller contract.
        Some(unsafe { std::slice::from_raw_parts_mut(data, len) })
    }
}

fn sorted(keys: &[i64]) -> bool {
    keys.windows(2).all(|w| w[0] <= w[1])
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn cm_status_message(status: CmStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        CmStatus::Ok => b"ok\0",
        CmStatus::NullPointer => b"null pointer\0",
        CmStatus::InvalidArgument => b"invalid argument\0",
        CmStatus::UnsortedInput => b"input is not sorted\0",
        CmStatus::OutOfRange => b"index out of range\0",
        CmStatus::PoolFailure => b"could not start worker threads\0",
        CmStatus::Panic => b"internal panic\0",
    };
    msg.as_ptr().cast()
}

/// Creates a pool of `workers` threads. `oversubscription` is the number of
/// blocks per worker used when a call passes `p == 0` (0 is treated as 1).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cm_executor_new(
    workers: usize,
    oversubscription: usize,
    out: *mut *mut CmExecutor,
) -> CmStatus {
    if out.is_null() {
        return CmStatus::NullPointer;
    }
    guard(|| match Executor::new(workers) {
        Ok(ex) => {
            let handle = Box::new(CmExecutor {
                inner: ex.with_oversubscription(oversubscription),
            });
            // SAFETY: `out` checked non-null above.
            unsafe { *out = Box::into_raw(handle) };
            CmStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// # Safety
/// `executor` must be NULL or a handle from [`cm_executor_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm_executor_free(executor: *mut CmExecutor) {
    if !executor.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(executor) });
    }
}

/// Stable merge of sorted `a` (length `n`) and sorted `b` (length `m`) into
/// `out_keys` (length `n + m`). When non-NULL, `out_origin` receives 0 or 1
/// (A or B) and `out_index` the source position of each output element.
/// `p == 0` selects the executor's default block count.
///
/// # Safety
/// All non-NULL pointers must be valid for their stated lengths; `n + m` for
/// the three outputs.
#[no_mangle]
pub unsafe extern "C" fn cm_merge_i64(
    executor: *const CmExecutor,
    a: *const i64,
    n: usize,
    b: *const i64,
    m: usize,
    p: usize,
    out_keys: *mut i64,
    out_origin: *mut u8,
    out_index: *mut usize,
) -> CmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let ex = tri!(unsafe { executor.as_ref() }.ok_or(CmStatus::NullPointer));
        let a = tri!(unsafe { input(a, n) });
        let b = tri!(unsafe { input(b, m) });
        let total = tri!(n.checked_add(m).ok_or(CmStatus::InvalidArgument));
        let keys_out = tri!(unsafe { output(out_keys, total) });
        let origin_out = unsafe { optional_output(out_origin, total) };
        let index_out = unsafe { optional_output(out_index, total) };
        if !sorted(a) || !sorted(b) {
            return CmStatus::UnsortedInput;
        }
        let p = if p == 0 { ex.inner.default_blocks() } else { p };
        if origin_out.is_none() && index_out.is_none() {
            let merged = tri!(ex.inner.merge(a, b, p).map_err(|e| status_of(&e)));
            keys_out.copy_from_slice(&merged);
            return CmStatus::Ok;
        }
        let a = crossmerge::item::tag(a.iter().copied(), Origin::A);
        let b = crossmerge::item::tag(b.iter().copied(), Origin::B);
        let merged = tri!(ex.inner.merge_by(&a, &b, p, Item::cmp_key).map_err(|e| status_of(&e)));
        for (slot, item) in keys_out.iter_mut().zip(&merged) {
            *slot = item.key;
        }
        if let Some(origin_out) = origin_out {
            for (slot, item) in origin_out.iter_mut().zip(&merged) {
                *slot = u8::from(item.origin == Origin::B);
            }
        }
        if let Some(index_out) = index_out {
            for (slot, item) in index_out.iter_mut().zip(&merged) {
                *slot = item.source_index;
            }
        }
        CmStatus::Ok
    })
}

/// Stable in-place sort of `v` (length `n`) with `p` initial blocks
/// (`p == 0` for the executor default). When non-NULL, `out_perm` receives
/// for each output position the original index of the element now there.
///
/// # Safety
/// `v` must be valid for `n` reads and writes and `out_perm`, when non-NULL,
/// for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn cm_sort_i64(
    executor: *const CmExecutor,
    v: *mut i64,
    n: usize,
    p: usize,
    out_perm: *mut usize,
) -> CmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let ex = tri!(unsafe { executor.as_ref() }.ok_or(CmStatus::NullPointer));
        let keys = tri!(unsafe { output(v, n) });
        let perm = unsafe { optional_output(out_perm, n) };
        let p = if p == 0 { ex.inner.default_blocks() } else { p };
        match perm {
            None => tri!(ex.inner.sort(keys, p).map_err(|e| status_of(&e))),
            Some(perm) => {
                let mut items = crossmerge::item::tag(keys.iter().copied(), Origin::A);
                tri!(ex
                    .inner
                    .sort_by(&mut items, p, Item::cmp_key)
                    .map_err(|e| status_of(&e)));
                for ((k, idx), item) in keys.iter_mut().zip(perm.iter_mut()).zip(&items) {
                    *k = item.key;
                    *idx = item.source_index;
                }
            }
        }
        CmStatus::Ok
    })
}

/// Number of elements of sorted `x` strictly less than `key`.
///
/// # Safety
/// `x` must be valid for `len` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_rank_low_i64(key: i64, x: *const i64, len: usize, out: *mut usize) -> CmStatus {
    // SAFETY: caller contract.
    unsafe { rank_with(key, x, len, out, crossmerge::rank_low) }
}

/// Number of elements of sorted `x` less than or equal to `key`.
///
/// # Safety
/// `x` must be valid for `len` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_rank_high_i64(key: i64, x: *const i64, len: usize, out: *mut usize) -> CmStatus {
    // SAFETY: caller contract.
    unsafe { rank_with(key, x, len, out, crossmerge::rank_high) }
}

unsafe fn rank_with(key: i64, x: *const i64, len: usize, out: *mut usize, rank: fn(&i64, &[i64]) -> usize) -> CmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let x = tri!(unsafe { input(x, len) });
        if out.is_null() {
            return CmStatus::NullPointer;
        }
        if !sorted(x) {
            return CmStatus::UnsortedInput;
        }
        // SAFETY: checked non-null.
        unsafe { *out = rank(&key, x) };
        CmStatus::Ok
    })
}

/// Builds the merge plan of sorted `a` and `b` with `p` blocks each.
///
/// # Safety
/// `a`, `b` must be valid for `n`, `m` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_plan_new_i64(
    a: *const i64,
    n: usize,
    b: *const i64,
    m: usize,
    p: usize,
    out: *mut *mut CmPlan,
) -> CmStatus {
    guard(|| {
        // SAFETY: caller contract.
        let a = tri!(unsafe { input(a, n) });
        let b = tri!(unsafe { input(b, m) });
        if out.is_null() {
            return CmStatus::NullPointer;
        }
        if !sorted(a) || !sorted(b) {
            return CmStatus::UnsortedInput;
        }
        let plan = tri!(crossmerge::build_plan(a, b, p).map_err(|e| status_of(&e)));
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(CmPlan { inner: plan })) };
        CmStatus::Ok
    })
}

/// Number of tasks (`2p`), or 0 for NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_plan_task_count(plan: *const CmPlan) -> usize {
    // SAFETY: caller contract.
    unsafe { plan.as_ref() }.map_or(0, |p| p.inner.tasks.len())
}

/// Copies task `index` into `out`. Tasks are ordered A-side blocks `0..p`,
/// then B-side blocks `0..p`.
///
/// # Safety
/// `plan` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_plan_get_task(plan: *const CmPlan, index: usize, out: *mut CmTask) -> CmStatus {
    // SAFETY: caller contract.
    let Some(plan) = (unsafe { plan.as_ref() }) else {
        return CmStatus::NullPointer;
    };
    if out.is_null() {
        return CmStatus::NullPointer;
    }
    let Some(task) = plan.inner.tasks.get(index) else {
        return CmStatus::OutOfRange;
    };
    let case_letter = match task.case {
        MergeCase::A => b'a',
        MergeCase::B => b'b',
        MergeCase::C => b'c',
        MergeCase::D => b'd',
        MergeCase::E => b'e',
    };
    let value = CmTask {
        side: u8::from(task.side == Side::B),
        case_letter,
        a_start: task.a_range.start,
        a_end: task.a_range.end,
        b_start: task.b_range.start,
        b_end: task.b_range.end,
        out_offset: task.out_offset,
    };
    // SAFETY: checked non-null.
    unsafe { ptr::write(out, value) };
    CmStatus::Ok
}

/// # Safety
/// `plan` must be NULL or a handle from [`cm_plan_new_i64`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm_plan_free(plan: *mut CmPlan) {
    if !plan.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(plan) });
    }
}
