//! Brute-force reference implementations for tests and the `verify` command.
//! Nothing here is shared with the parallel code paths.

use std::cmp::Ordering;

use crate::item::{tag, Item, Origin};

/// Sequential stable merge: on equal keys every element of `a` precedes every
/// element of `b`.
pub fn oracle_merge_by<T, F>(a: &[T], b: &[T], compare: F) -> Vec<T>
where
    T: Clone,
    F: Fn(&T, &T) -> Ordering,
{
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut a = a.iter().peekable();
    let mut b = b.iter().peekable();
    loop {
        let take_a = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => compare(x, y) != Ordering::Greater,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let next = if take_a { a.next() } else { b.next() };
        out.extend(next.cloned());
    }
    out
}

pub fn oracle_merge<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    oracle_merge_by(a, b, T::cmp)
}

/// Stable sort built from an unstable sort with ties broken by position.
pub fn oracle_sort_by<T, F>(v: &[T], compare: F) -> Vec<T>
where
    T: Clone,
    F: Fn(&T, &T) -> Ordering,
{
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_unstable_by(|&i, &j| compare(&v[i], &v[j]).then(i.cmp(&j)));
    order.into_iter().map(|i| v[i].clone()).collect()
}

pub fn oracle_sort<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    oracle_sort_by(v, T::cmp)
}

/// Every non-decreasing sequence of length at most `max_len` over the keys
/// `0..alphabet`, shortest first.
pub fn sorted_sequences(max_len: usize, alphabet: u32) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, remaining: usize, alphabet: u32, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let lo = prefix.last().copied().unwrap_or(0);
        for k in lo..alphabet {
            prefix.push(k);
            extend(prefix, remaining - 1, alphabet, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for len in 0..=max_len {
        extend(&mut Vec::with_capacity(len), len, alphabet, &mut out);
    }
    out
}

/// Every sequence (sorted or not) of length at most `max_len` over `0..alphabet`.
pub fn all_sequences(max_len: usize, alphabet: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..max_len {
        level = level
            .iter()
            .flat_map(|s: &Vec<u32>| {
                (0..alphabet).map(move |k| {
                    let mut t = s.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// Every pair of tagged non-decreasing sequences within the bounds.
pub fn enumerate_instances(max_len: usize, alphabet: u32) -> impl Iterator<Item = (Vec<Item<u32>>, Vec<Item<u32>>)> {
    let seqs = sorted_sequences(max_len, alphabet);
    let pairs: Vec<_> = seqs
        .iter()
        .flat_map(|a| seqs.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    pairs.into_iter().map(|(a, b)| (tag(a, Origin::A), tag(b, Origin::B)))
}
