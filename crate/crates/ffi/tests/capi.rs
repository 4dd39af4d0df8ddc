use std::ffi::CStr;
use std::ptr;

use crossmerge_ffi::*;

fn executor(workers: usize) -> *mut CmExecutor {
    let mut ex = ptr::null_mut();
    assert_eq!(unsafe { cm_executor_new(workers, 2, &mut ex) }, CmStatus::Ok);
    assert!(!ex.is_null());
    ex
}

#[test]
fn merge_with_tags() {
    let ex = executor(3);
    let a = [0i64, 0, 1, 1, 1, 2, 2, 2, 4, 5, 5, 5, 5, 5, 6, 6, 7, 7];
    let b = [1i64, 1, 3, 3, 3, 3, 4, 5, 6, 6, 6, 6, 7, 7, 7];
    let mut keys = [0i64; 33];
    let mut origin = [9u8; 33];
    let mut index = [0usize; 33];
    let status = unsafe {
        cm_merge_i64(
            ex,
            a.as_ptr(),
            a.len(),
            b.as_ptr(),
            b.len(),
            5,
            keys.as_mut_ptr(),
            origin.as_mut_ptr(),
            index.as_mut_ptr(),
        )
    };
    assert_eq!(status, CmStatus::Ok);
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    // Ties: the three A ones precede the two B ones.
    assert_eq!(&origin[2..7], &[0, 0, 0, 1, 1]);
    assert_eq!(&index[2..7], &[2, 3, 4, 0, 1]);

    let mut keys_only = [0i64; 33];
    let status = unsafe {
        cm_merge_i64(
            ex,
            a.as_ptr(),
            a.len(),
            b.as_ptr(),
            b.len(),
            0,
            keys_only.as_mut_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, CmStatus::Ok);
    assert_eq!(keys_only, keys);
    unsafe { cm_executor_free(ex) };
}

#[test]
fn merge_errors() {
    let ex = executor(1);
    let a = [3i64, 1];
    let mut out = [0i64; 2];
    let unsorted = unsafe {
        cm_merge_i64(
            ex,
            a.as_ptr(),
            2,
            ptr::null(),
            0,
            1,
            out.as_mut_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(unsorted, CmStatus::UnsortedInput);
    let null_in = unsafe {
        cm_merge_i64(
            ex,
            ptr::null(),
            2,
            ptr::null(),
            0,
            1,
            out.as_mut_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(null_in, CmStatus::NullPointer);
    let no_exec = unsafe {
        cm_merge_i64(
            ptr::null(),
            ptr::null(),
            0,
            ptr::null(),
            0,
            1,
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(no_exec, CmStatus::NullPointer);
    let empty = unsafe {
        cm_merge_i64(
            ex,
            ptr::null(),
            0,
            ptr::null(),
            0,
            4,
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(empty, CmStatus::Ok);

    let mut none = ptr::null_mut();
    assert_eq!(unsafe { cm_executor_new(0, 1, &mut none) }, CmStatus::InvalidArgument);
    assert!(none.is_null());
    unsafe { cm_executor_free(ex) };
    unsafe { cm_executor_free(ptr::null_mut()) };
}

#[test]
fn sort_with_permutation() {
    let ex = executor(2);
    let mut v = [5i64, 1, 5, 0, 1];
    let mut perm = [0usize; 5];
    assert_eq!(
        unsafe { cm_sort_i64(ex, v.as_mut_ptr(), 5, 3, perm.as_mut_ptr()) },
        CmStatus::Ok
    );
    assert_eq!(v, [0, 1, 1, 5, 5]);
    assert_eq!(perm, [3, 1, 4, 0, 2]);
    let mut w = [2i64, 1];
    assert_eq!(
        unsafe { cm_sort_i64(ex, w.as_mut_ptr(), 2, 0, ptr::null_mut()) },
        CmStatus::Ok
    );
    assert_eq!(w, [1, 2]);
    unsafe { cm_executor_free(ex) };
}

#[test]
fn ranks() {
    let b = [1i64, 1, 3, 3, 3, 3, 4, 5, 6, 6, 6, 6, 7, 7, 7];
    let mut r = 0usize;
    assert_eq!(unsafe { cm_rank_low_i64(5, b.as_ptr(), b.len(), &mut r) }, CmStatus::Ok);
    assert_eq!(r, 7);
    assert_eq!(
        unsafe { cm_rank_high_i64(5, b.as_ptr(), b.len(), &mut r) },
        CmStatus::Ok
    );
    assert_eq!(r, 8);
    assert_eq!(
        unsafe { cm_rank_low_i64(5, b.as_ptr(), b.len(), ptr::null_mut()) },
        CmStatus::NullPointer
    );
}

#[test]
fn plan_handle() {
    let a = [0i64, 0, 1, 1, 1, 2, 2, 2, 4, 5, 5, 5, 5, 5, 6, 6, 7, 7];
    let b = [1i64, 1, 3, 3, 3, 3, 4, 5, 6, 6, 6, 6, 7, 7, 7];
    let mut plan = ptr::null_mut();
    assert_eq!(
        unsafe { cm_plan_new_i64(a.as_ptr(), 18, b.as_ptr(), 15, 5, &mut plan) },
        CmStatus::Ok
    );
    assert_eq!(unsafe { cm_plan_task_count(plan) }, 10);
    let mut t = CmTask::default();
    assert_eq!(unsafe { cm_plan_get_task(plan, 5, &mut t) }, CmStatus::Ok);
    assert_eq!(
        t,
        CmTask {
            side: 1,
            case_letter: b'd',
            a_start: 5,
            a_end: 8,
            b_start: 0,
            b_end: 3,
            out_offset: 5
        }
    );
    assert_eq!(unsafe { cm_plan_get_task(plan, 10, &mut t) }, CmStatus::OutOfRange);
    unsafe { cm_plan_free(plan) };

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { cm_plan_new_i64(a.as_ptr(), 18, b.as_ptr(), 15, 0, &mut bad) },
        CmStatus::InvalidArgument
    );
    assert_eq!(unsafe { cm_plan_task_count(ptr::null()) }, 0);
}

#[test]
fn status_messages() {
    let msg = unsafe { CStr::from_ptr(cm_status_message(CmStatus::UnsortedInput)) };
    assert_eq!(msg.to_str().unwrap(), "input is not sorted");
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/crossmerge.h")).unwrap();
    for name in [
        "cm_executor_new",
        "cm_executor_free",
        "cm_merge_i64",
        "cm_sort_i64",
        "cm_rank_low_i64",
        "cm_rank_high_i64",
        "cm_plan_new_i64",
        "cm_plan_task_count",
        "cm_plan_get_task",
        "cm_plan_free",
        "cm_status_message",
        "CM_STATUS_UNSORTED_INPUT",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
