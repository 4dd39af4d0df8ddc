//! Low and high ranks of a key in a non-decreasing sequence.
//!
//! With virtual sentinels `X[-1] = -inf` and `X[len] = +inf`, the low rank of
//! `x` is the unique `i` with `X[i-1] < x <= X[i]` and the high rank is the
//! unique `j` with `X[j-1] <= x < X[j]`. Equivalently, the low rank counts the
//! elements strictly less than `x` and the high rank counts the elements not
//! greater than `x`. The sentinels are never stored or read.

use std::cmp::Ordering;

/// Upper bound on the comparisons made by one rank search over `len` elements:
/// `ceil(log2(len + 1)) + 1`.
pub fn comparison_budget(len: usize) -> usize {
    ceil_log2(len + 1) + 1
}

/// `ceil(log2(x))` for `x >= 1`, and 0 for `x <= 1`.
pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// Number of leading elements of `seq` for which `goes_left` holds, assuming
/// the predicate is monotone (true then false).
fn boundary<T>(seq: &[T], mut goes_left: impl FnMut(&T) -> bool) -> usize {
    let mut lo = 0;
    let mut size = seq.len();
    while size > 0 {
        let half = size / 2;
        let mid = lo + half;
        if goes_left(&seq[mid]) {
            lo = mid + 1;
            size -= half + 1;
        } else {
            size = half;
        }
    }
    lo
}

pub fn rank_low_by<T, F>(x: &T, seq: &[T], compare: F) -> usize
where
    F: Fn(&T, &T) -> Ordering,
{
    boundary(seq, |y| compare(y, x) == Ordering::Less)
}

pub fn rank_high_by<T, F>(x: &T, seq: &[T], compare: F) -> usize
where
    F: Fn(&T, &T) -> Ordering,
{
    boundary(seq, |y| compare(y, x) != Ordering::Greater)
}

pub fn rank_low<T: Ord>(x: &T, seq: &[T]) -> usize {
    rank_low_by(x, seq, T::cmp)
}

pub fn rank_high<T: Ord>(x: &T, seq: &[T]) -> usize {
    rank_high_by(x, seq, T::cmp)
}
